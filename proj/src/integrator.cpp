#include "wolbachia/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "wolbachia/errors.hpp"
#include "wolbachia/model.hpp"

namespace wolbachia {

namespace {

using Vec = std::array<double, kStateSize>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Error coefficients: 5th-order weights minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

// Release rate on one restart segment [a, b]. At t = a the value of the piece
// starting there is used, so that a step never sees the previous piece.
class SegmentRelease {
 public:
  SegmentRelease(const ReleaseSchedule& s, double a, double b)
      : schedule_(s), a_(a), b_(b), inner_(a < b ? std::nextafter(a, b) : a) {}

  double operator()(double t) const {
    return schedule_.evaluate(std::clamp(t, inner_, b_));
  }

 private:
  const ReleaseSchedule& schedule_;
  double a_;
  double b_;
  double inner_;
};

std::vector<double> restart_points(const ReleaseSchedule& schedule) {
  std::vector<double> pts{0.0};
  for (double b : schedule.breakpoints()) pts.push_back(b);
  pts.push_back(static_cast<double>(schedule.horizon()));
  return pts;
}

class Evaluator {
 public:
  Evaluator(const ModelParameters& p, IntegrationStats& stats)
      : params_(p), stats_(stats) {}

  Vec operator()(double t, const Vec& y, double release) {
    ++stats_.rhs_evaluations;
    try {
      return rhs(t, StateVector{y}, params_, release).values;
    } catch (const ComputationError& e) {
      throw IntegrationError(IntegrationError::Kind::NonFinite, t,
                             e.compartment(), e.what());
    } catch (const DomainError& e) {
      throw IntegrationError(IntegrationError::Kind::NonFinite, t, "N_h",
                             e.what());
    }
  }

 private:
  const ModelParameters& params_;
  IntegrationStats& stats_;
};

void check_positivity(StateVector& y, double t) {
  const std::size_t worst = clamp_roundoff(y);
  if (worst != kStateSize) {
    throw IntegrationError(
        IntegrationError::Kind::Positivity, t,
        std::string(kCompartmentNames[worst]),
        fmt::format("compartment {} became negative ({}) at day {}",
                    kCompartmentNames[worst], y.values[worst], t));
  }
}

void check_finite(const Vec& y, double t) {
  for (std::size_t i = 0; i < kStateSize; ++i) {
    if (!std::isfinite(y[i])) {
      throw IntegrationError(
          IntegrationError::Kind::NonFinite, t,
          std::string(kCompartmentNames[i]),
          fmt::format("compartment {} is not finite at day {}",
                      kCompartmentNames[i], t));
    }
  }
}

class AquaticWatch {
 public:
  explicit AquaticWatch(double K_a) : K_a_(K_a) {}

  void observe(const StateVector& y, double t, std::vector<std::string>& log) {
    if (reported_) return;
    const double aquatic = y[Compartment::A] + y[Compartment::A_w];
    if (aquatic > K_a_ * (1.0 + 1e-6)) {
      log.push_back(fmt::format(
          "day {:.4f}: aquatic population {} exceeds K_a = {} (release above "
          "the invariant bound?)",
          t, aquatic, K_a_));
      reported_ = true;
    }
  }

 private:
  double K_a_;
  bool reported_ = false;
};

void validate_config(const IntegratorConfig& c) {
  if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) {
    throw ValidationError("integrator tolerances must be positive");
  }
  if (!(c.max_step > 0.0) || !(c.initial_step > 0.0)) {
    throw ValidationError("integrator step sizes must be positive");
  }
  if (c.max_steps == 0) throw ValidationError("max_steps must be positive");
}

}  // namespace

StateVector DenseSegment::evaluate(double t) const {
  const double s = (t - t0) / h;
  const double s1 = 1.0 - s;
  StateVector out;
  for (std::size_t i = 0; i < kStateSize; ++i) {
    out.values[i] =
        coeffs[0][i] +
        s * (coeffs[1][i] +
             s1 * (coeffs[2][i] + s * (coeffs[3][i] + s1 * coeffs[4][i])));
  }
  return out;
}

Trajectory integrate_adaptive(const ModelParameters& params,
                              const StateVector& initial,
                              const ReleaseSchedule& schedule,
                              const IntegratorConfig& config) {
  validate_config(config);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  if (schedule.horizon() == 0) return traj;

  Evaluator f(params, traj.stats);
  AquaticWatch watch(params.K_a);
  const auto pts = restart_points(schedule);
  Vec y = initial.values;
  double h = std::min(config.initial_step, config.max_step);

  for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
    const double a = pts[seg];
    const double b = pts[seg + 1];
    const SegmentRelease r(schedule, a, b);
    double t = a;
    Vec k1 = f(t, y, r(t));
    Vec k2, k3, k4, k5, k6, k7, stage, y_new;

    while (t < b) {
      if (traj.stats.accepted + traj.stats.rejected >= config.max_steps) {
        throw IntegrationError(IntegrationError::Kind::StepLimit, t, "",
                               fmt::format("step limit {} exceeded at day {}",
                                           config.max_steps, t));
      }
      double target = b;
      if (config.land_on_days) target = std::min(b, std::floor(t) + 1.0);
      bool final_step = false;
      double step = std::min(h, config.max_step);
      if (t + step >= target || target - (t + step) < 1e-10 * std::max(1.0, t)) {
        step = target - t;
        final_step = true;
      }
      if (step < 1e-12 * std::max(1.0, std::abs(t))) {
        throw IntegrationError(IntegrationError::Kind::StepUnderflow, t, "",
                               fmt::format("step size underflow at day {}", t));
      }

      for (std::size_t i = 0; i < kStateSize; ++i) stage[i] = y[i] + step * a21 * k1[i];
      k2 = f(t + c2 * step, stage, r(t + c2 * step));
      for (std::size_t i = 0; i < kStateSize; ++i)
        stage[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
      k3 = f(t + c3 * step, stage, r(t + c3 * step));
      for (std::size_t i = 0; i < kStateSize; ++i)
        stage[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f(t + c4 * step, stage, r(t + c4 * step));
      for (std::size_t i = 0; i < kStateSize; ++i)
        stage[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
      k5 = f(t + c5 * step, stage, r(t + c5 * step));
      for (std::size_t i = 0; i < kStateSize; ++i)
        stage[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
      const double t_new = final_step ? target : t + step;
      k6 = f(t + step, stage, r(t_new));
      for (std::size_t i = 0; i < kStateSize; ++i)
        y_new[i] = y[i] + step * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
      k7 = f(t_new, y_new, r(t_new));

      double err = 0.0;
      for (std::size_t i = 0; i < kStateSize; ++i) {
        const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                 e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double scale =
            config.abs_tol +
            config.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) err = 1e10;

      if (err > 1.0) {
        ++traj.stats.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }

      ++traj.stats.accepted;
      check_finite(y_new, t_new);

      DenseSegment dense;
      dense.t0 = t;
      dense.h = t_new - t;
      for (std::size_t i = 0; i < kStateSize; ++i) {
        const double dy = y_new[i] - y[i];
        const double bspl = step * k1[i] - dy;
        dense.coeffs[0][i] = y[i];
        dense.coeffs[1][i] = dy;
        dense.coeffs[2][i] = bspl;
        dense.coeffs[3][i] = dy - step * k7[i] - bspl;
        dense.coeffs[4][i] =
            step * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                    d6 * k6[i] + d7 * k7[i]);
      }

      StateVector accepted{y_new};
      const StateVector before = accepted;
      check_positivity(accepted, t_new);
      watch.observe(accepted, t_new, traj.diagnostics);

      traj.times.push_back(t_new);
      traj.states.push_back(accepted);
      traj.segments.push_back(dense);

      y = accepted.values;
      if (accepted == before) {
        k1 = k7;
      } else {
        k1 = f(t_new, y, r(t_new));
      }
      t = t_new;
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // After a forced short step to a landing point keep the previous size.
      h = final_step ? std::max(h, step * grow) : step * grow;
    }
  }
  return traj;
}

Trajectory integrate_fixed_rk4(const ModelParameters& params,
                               const StateVector& initial,
                               const ReleaseSchedule& schedule, double step) {
  if (!(step > 0.0) || step > 1.0) {
    throw ValidationError("RK4 step must lie in (0, 1]");
  }
  const double per_day_real = 1.0 / step;
  const long per_day = std::lround(per_day_real);
  if (std::abs(per_day_real - static_cast<double>(per_day)) > 1e-9 * per_day_real) {
    throw ValidationError("RK4 step must divide one day exactly");
  }

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  Evaluator f(params, traj.stats);
  AquaticWatch watch(params.K_a);

  const auto pts = restart_points(schedule);
  Vec y = initial.values;
  Vec k1, k2, k3, k4, stage;
  const int horizon = schedule.horizon();

  std::size_t seg = 0;
  for (int day = 0; day < horizon; ++day) {
    while (seg + 2 < pts.size() && pts[seg + 1] <= day) ++seg;
    const SegmentRelease r(schedule, pts[seg], pts[seg + 1]);
    for (long j = 0; j < per_day; ++j) {
      const double t = day + static_cast<double>(j) / per_day;
      const double tm = t + 0.5 * step;
      const double te = day + static_cast<double>(j + 1) / per_day;
      k1 = f(t, y, r(t));
      for (std::size_t i = 0; i < kStateSize; ++i) stage[i] = y[i] + 0.5 * step * k1[i];
      k2 = f(tm, stage, r(tm));
      for (std::size_t i = 0; i < kStateSize; ++i) stage[i] = y[i] + 0.5 * step * k2[i];
      k3 = f(tm, stage, r(tm));
      for (std::size_t i = 0; i < kStateSize; ++i) stage[i] = y[i] + step * k3[i];
      k4 = f(te, stage, r(te));
      for (std::size_t i = 0; i < kStateSize; ++i)
        y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      check_finite(y, te);
      ++traj.stats.accepted;
    }
    StateVector s{y};
    check_positivity(s, day + 1);
    watch.observe(s, day + 1, traj.diagnostics);
    y = s.values;
    traj.times.push_back(day + 1);
    traj.states.push_back(s);
  }
  return traj;
}

std::vector<StateVector> sample_daily(const Trajectory& traj, int horizon) {
  if (traj.times.empty() || traj.end_time() < horizon) {
    throw DomainError(fmt::format(
        "trajectory ends at day {} but {} days were requested", traj.end_time(),
        horizon));
  }
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  std::size_t k = 0;
  for (int day = 0; day <= horizon; ++day) {
    const double t = day;
    while (k + 1 < traj.times.size() && traj.times[k + 1] <= t) ++k;
    if (traj.times[k] == t) {
      out.push_back(traj.states[k]);
    } else if (k < traj.segments.size()) {
      out.push_back(traj.segments[k].evaluate(t));
    } else {
      throw DomainError(
          fmt::format("no sample or continuous extension covers day {}", day));
    }
  }
  return out;
}

}  // namespace wolbachia
