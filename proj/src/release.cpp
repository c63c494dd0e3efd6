#include "wolbachia/release.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "wolbachia/errors.hpp"
#include "wolbachia/numeric_format.hpp"

namespace wolbachia {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double bump_value(const BumpRelease& b, double t) {
  return b.magnitude / std::cosh(0.01 * (t - b.peak_day));
}

}  // namespace

ReleaseSchedule::ReleaseSchedule(ReleaseShape shape, int horizon)
    : shape_(std::move(shape)), horizon_(horizon) {
  if (horizon_ < 0) throw ValidationError("release horizon must be >= 0");
  auto nonneg = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(
          fmt::format("{} must be finite and non-negative (got {})", what, v));
    }
  };
  std::visit(Overloaded{
                 [&](const ConstantRelease& c) { nonneg(c.level, "constant release"); },
                 [&](const LinearDecreasingRelease& l) {
                   nonneg(l.magnitude, "linear release magnitude");
                 },
                 [&](const BumpRelease& b) {
                   nonneg(b.magnitude, "bump release magnitude");
                   if (!std::isfinite(b.peak_day)) {
                     throw ValidationError("bump peak day must be finite");
                   }
                 },
                 [&](const PiecewiseRelease& p) {
                   if (p.values.empty()) {
                     throw ValidationError("piecewise release needs at least one piece");
                   }
                   for (double v : p.values) nonneg(v, "piecewise release value");
                   if (horizon_ > 0) {
                     const int n = static_cast<int>(p.values.size());
                     if (piece_length(horizon_, n) * (n - 1) >= horizon_) {
                       throw ValidationError(fmt::format(
                           "{} pieces leave the last piece empty for T = {}", n,
                           horizon_));
                     }
                   }
                 },
             },
             shape_);
}

int piece_length(int horizon, int pieces) {
  if (pieces < 1) throw ValidationError("number of pieces must be >= 1");
  return (horizon + pieces - 1) / pieces;
}

int piece_index(double t, int horizon, int pieces) {
  const int len = std::max(piece_length(horizon, pieces), 1);
  const int i = static_cast<int>(std::ceil(t / len));
  return std::clamp(i, 1, pieces);
}

std::vector<int> piece_day_counts(int horizon, int pieces) {
  std::vector<int> counts(static_cast<std::size_t>(pieces), 0);
  for (int t = 1; t <= horizon; ++t) {
    ++counts[static_cast<std::size_t>(piece_index(t, horizon, pieces) - 1)];
  }
  return counts;
}

double ReleaseSchedule::evaluate(double t) const {
  if (!(t >= 0.0 && t <= static_cast<double>(horizon_))) {
    throw DomainError(
        fmt::format("release evaluated at t = {} outside [0, {}]", t, horizon_));
  }
  const double T = horizon_;
  return std::visit(
      Overloaded{
          [](const ConstantRelease& c) { return c.level; },
          [&](const LinearDecreasingRelease& l) {
            if (T == 0.0) return 2.0 * l.magnitude;
            return std::max(0.0, -(2.0 * l.magnitude / T) * (t - T));
          },
          [&](const BumpRelease& b) { return bump_value(b, t); },
          [&](const PiecewiseRelease& p) {
            const int n = static_cast<int>(p.values.size());
            return p.values[static_cast<std::size_t>(piece_index(t, horizon_, n) - 1)];
          },
      },
      shape_);
}

std::vector<double> ReleaseSchedule::breakpoints() const {
  std::vector<double> out;
  if (const auto* p = std::get_if<PiecewiseRelease>(&shape_)) {
    const int n = static_cast<int>(p->values.size());
    const int len = piece_length(horizon_, n);
    for (int i = 1; i < n; ++i) {
      const int b = len * i;
      if (b > 0 && b < horizon_) out.push_back(b);
    }
  }
  return out;
}

double ReleaseSchedule::peak() const {
  const double T = horizon_;
  return std::visit(
      Overloaded{
          [](const ConstantRelease& c) { return c.level; },
          [](const LinearDecreasingRelease& l) { return 2.0 * l.magnitude; },
          [&](const BumpRelease& b) {
            const double nearest = std::clamp(b.peak_day, 0.0, T);
            return bump_value(b, nearest);
          },
          [](const PiecewiseRelease& p) {
            return *std::max_element(p.values.begin(), p.values.end());
          },
      },
      shape_);
}

ReleaseSchedule ReleaseSchedule::scaled(double factor) const {
  ReleaseShape s = shape_;
  std::visit(Overloaded{
                 [&](ConstantRelease& c) { c.level *= factor; },
                 [&](LinearDecreasingRelease& l) { l.magnitude *= factor; },
                 [&](BumpRelease& b) { b.magnitude *= factor; },
                 [&](PiecewiseRelease& p) {
                   for (double& v : p.values) v *= factor;
                 },
             },
             s);
  return ReleaseSchedule(std::move(s), horizon_);
}

std::string ReleaseSchedule::describe() const {
  return std::visit(
      Overloaded{
          [](const ConstantRelease& c) {
            return "constant:" + format_number(c.level);
          },
          [](const LinearDecreasingRelease& l) {
            return "linear:" + format_number(l.magnitude);
          },
          [](const BumpRelease& b) {
            return "bump:" + format_number(b.magnitude) + "@" +
                   format_number(b.peak_day);
          },
          [](const PiecewiseRelease& p) {
            std::string out = "piecewise:";
            for (std::size_t i = 0; i < p.values.size(); ++i) {
              if (i) out += ',';
              out += format_number(p.values[i]);
            }
            return out;
          },
      },
      shape_);
}

ReleaseSchedule ReleaseSchedule::parse(const std::string& spec, int horizon) {
  if (spec == "zero" || spec == "none") return zero(horizon);
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ValidationError(fmt::format(
        "schedule '{}' must look like kind:args (constant:R, linear:M, "
        "bump:M@DAY, piecewise:R1,R2,...)",
        spec));
  }
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "constant") return {ConstantRelease{parse_number(args)}, horizon};
  if (kind == "linear") return {LinearDecreasingRelease{parse_number(args)}, horizon};
  if (kind == "bump") {
    const auto at = args.find('@');
    if (at == std::string::npos) {
      return {BumpRelease{parse_number(args), 50.0}, horizon};
    }
    return {BumpRelease{parse_number(args.substr(0, at)),
                        parse_number(args.substr(at + 1))},
            horizon};
  }
  if (kind == "piecewise") {
    PiecewiseRelease p;
    std::size_t start = 0;
    while (start <= args.size()) {
      const auto comma = args.find(',', start);
      p.values.push_back(parse_number(args.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return {std::move(p), horizon};
  }
  throw ValidationError(fmt::format("unknown schedule kind '{}'", kind));
}

double total_release(const ReleaseSchedule& schedule) {
  if (const auto* p = std::get_if<PiecewiseRelease>(&schedule.shape())) {
    const auto counts = piece_day_counts(schedule.horizon(),
                                         static_cast<int>(p->values.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      total += counts[i] * p->values[i];
    }
    return total;
  }
  double total = 0.0;
  for (int t = 1; t <= schedule.horizon(); ++t) total += schedule.evaluate(t);
  return total;
}

std::vector<ReleaseSchedule> normalize_same_peak(
    const std::vector<ReleaseSchedule>& schedules, double peak) {
  if (!(peak > 0.0)) throw ValidationError("target peak must be positive");
  std::vector<ReleaseSchedule> out;
  out.reserve(schedules.size());
  for (const auto& s : schedules) {
    const double current = s.peak();
    if (!(current > 0.0)) {
      throw ValidationError("cannot normalize a zero-magnitude schedule");
    }
    out.push_back(s.scaled(peak / current));
  }
  return out;
}

std::vector<ReleaseSchedule> normalize_same_total(
    const std::vector<ReleaseSchedule>& schedules, double total) {
  if (!(total > 0.0)) throw ValidationError("target total must be positive");
  std::vector<ReleaseSchedule> out;
  out.reserve(schedules.size());
  for (const auto& s : schedules) {
    const double current = total_release(s);
    if (!(current > 0.0)) {
      throw ValidationError("cannot normalize a zero-magnitude schedule");
    }
    out.push_back(s.scaled(total / current));
  }
  return out;
}

}  // namespace wolbachia
