#include "wolbachia/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/model.hpp"

namespace wolbachia {

double CapacityFunction::max_value() const {
  if (kind == Kind::Table) {
    return table.empty() ? 0.0 : *std::max_element(table.begin(), table.end());
  }
  return std::max(initial, peak);
}

double capacity_at(const CapacityFunction& c, double t) {
  if (!(t >= 1.0)) {
    throw DomainError(fmt::format("capacity requested at day {} (< 1)", t));
  }
  if (c.kind == CapacityFunction::Kind::Table) {
    const auto day = static_cast<std::size_t>(std::ceil(t));
    if (day > c.table.size()) {
      throw DomainError(fmt::format("capacity table has no entry for day {}", t));
    }
    return c.table[day - 1];
  }
  if (c.initial == c.peak || c.peak_day <= 1.0) {
    return t >= c.peak_day ? c.peak : c.initial;
  }
  const double frac = std::min(1.0, (t - 1.0) / (c.peak_day - 1.0));
  return c.initial + (c.peak - c.initial) * frac;
}

void validate(const CapacityFunction& c) {
  if (c.kind == CapacityFunction::Kind::Table) {
    if (c.table.empty()) throw ValidationError("capacity table is empty");
    for (double v : c.table) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError("capacity table values must be finite and >= 0");
      }
    }
    return;
  }
  if (!(c.initial >= 0.0) || !(c.peak >= 0.0)) {
    throw ValidationError("capacity must be non-negative");
  }
  if (c.peak < c.initial) {
    throw ValidationError("capacity ramp must be non-decreasing (peak < initial)");
  }
  if (!std::isfinite(c.peak_day) || c.peak_day < 1.0) {
    throw ValidationError("capacity peak day must be >= 1");
  }
}

void validate(const SingleObjectiveProblem& p) {
  validate(p.params);
  validate(p.capacity);
  if (p.horizon < 1) throw ValidationError("horizon must be >= 1 day");
  if (p.pieces < 1) throw ValidationError("pieces must be >= 1");
  if (piece_length(p.horizon, p.pieces) * (p.pieces - 1) >= p.horizon) {
    throw ValidationError(fmt::format(
        "{} pieces leave the last piece empty for T = {}", p.pieces, p.horizon));
  }
  if (std::isnan(p.budget) || p.budget < 0.0) {
    throw ValidationError("budget must be >= 0");
  }
  if (!(p.cost.release_unit_cost >= 0.0) || !(p.cost.daily_hospital_cost >= 0.0)) {
    throw ValidationError("cost constants must be >= 0");
  }
  if (p.capacity.kind == CapacityFunction::Kind::Table &&
      p.capacity.table.size() < static_cast<std::size_t>(p.horizon)) {
    throw ValidationError("capacity table shorter than the horizon");
  }
  if (p.settings.max_iterations < 1 || p.settings.multistart < 1) {
    throw ValidationError("solver needs at least one iteration and one start");
  }
}

std::vector<double> piece_upper_bounds(const SingleObjectiveProblem& p) {
  const int len = piece_length(p.horizon, p.pieces);
  std::vector<double> upper(static_cast<std::size_t>(p.pieces));
  for (int i = 1; i <= p.pieces; ++i) {
    const int first = len * (i - 1) + 1;
    double bound = capacity_at(p.capacity, first);
    if (p.bound_mode == CapacityBoundMode::PieceMinimum) {
      const int last = std::min(len * i, p.horizon);
      for (int t = first + 1; t <= last; ++t) {
        bound = std::min(bound, capacity_at(p.capacity, t));
      }
    }
    upper[static_cast<std::size_t>(i - 1)] = bound;
  }
  return upper;
}

std::vector<double> budget_coefficients(const SingleObjectiveProblem& p) {
  std::vector<double> coeff(static_cast<std::size_t>(p.pieces));
  if (p.accounting == ReleaseAccounting::UniformPieceLength) {
    const int len = piece_length(p.horizon, p.pieces);
    std::fill(coeff.begin(), coeff.end(), len * p.cost.release_unit_cost);
  } else {
    const auto counts = piece_day_counts(p.horizon, p.pieces);
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      coeff[i] = counts[i] * p.cost.release_unit_cost;
    }
  }
  return coeff;
}

OptimalPolicy evaluate_policy(const SingleObjectiveProblem& p,
                              std::vector<double> values) {
  const ReleaseSchedule schedule(PiecewiseRelease{values}, p.horizon);
  const Trajectory traj =
      integrate_adaptive(p.params, p.initial, schedule, p.integrator);
  OptimalPolicy out;
  out.cost = objective(traj, schedule, p.cost, p.horizon, p.accounting);
  out.objective = p.objective == ObjectiveKind::Total ? out.cost.total_cost
                                                      : out.cost.societal_cost;
  out.values = std::move(values);
  return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Spectral projected gradient on the scaled variables z = x / scale, with
// the feasible set {0 <= z <= hi, w . z <= budget}.
class ProjectedGradientSolver {
 public:
  explicit ProjectedGradientSolver(const SingleObjectiveProblem& p)
      : p_(p), upper_(piece_upper_bounds(p)), coeff_(budget_coefficients(p)) {
    const std::size_t n = upper_.size();
    scale_.resize(n);
    hi_.resize(n);
    w_.resize(n);
    const double typical = p.params.max_invariant_release() > 0.0
                               ? p.params.max_invariant_release()
                               : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale_[i] = std::isfinite(upper_[i]) && upper_[i] > 0.0 ? upper_[i] : typical;
      hi_[i] = upper_[i] / scale_[i];
      w_[i] = coeff_[i] * scale_[i];
    }
    reference_ = std::max(std::abs(raw_objective(std::vector<double>(n, 0.0))), 1.0);
  }

  std::size_t dimension() const { return upper_.size(); }
  const std::vector<double>& upper() const { return upper_; }
  std::size_t evaluations() const { return evaluations_; }

  std::vector<double> to_z(const std::vector<double>& x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] / scale_[i];
    return z;
  }
  std::vector<double> to_x(const std::vector<double>& z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      x[i] = std::clamp(z[i] * scale_[i], 0.0, upper_[i]);
    }
    return x;
  }

  std::vector<double> project(const std::vector<double>& y) const {
    auto clip = [&](double lambda) {
      std::vector<double> z(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = std::clamp(y[i] - lambda * w_[i], 0.0, hi_[i]);
      }
      return z;
    };
    std::vector<double> z = clip(0.0);
    if (!std::isfinite(p_.budget) || dot(w_, z) <= p_.budget) return z;
    double lo = 0.0;
    double hi = 1.0;
    while (dot(w_, clip(hi)) > p_.budget) {
      hi *= 2.0;
      if (hi > 1e300) break;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (dot(w_, clip(mid)) > p_.budget) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return clip(hi);
  }

  double raw_objective(const std::vector<double>& x) {
    ++evaluations_;
    return evaluate_policy(p_, x).objective;
  }

  double phi(const std::vector<double>& z) { return raw_objective(to_x(z)) / reference_; }

  // Forward differences in x; backward at the upper bound. One integration per
  // component, evaluated in parallel.
  std::vector<double> gradient(const std::vector<double>& z, double phi_z) {
    const std::vector<double> x = to_x(z);
    const std::size_t n = x.size();
    std::vector<double> g(n, 0.0);
    std::vector<std::size_t> counts(n, 0);
    detail::parallel_for(n, p_.settings.threads, [&](std::size_t i) {
      const double span = std::isfinite(upper_[i]) ? upper_[i] : scale_[i];
      if (!(span > 0.0)) return;
      double h = std::max(p_.settings.fd_relative_step * span, p_.settings.fd_min_step);
      h = std::min(h, span);
      std::vector<double> xi = x;
      double sign = 1.0;
      if (x[i] + h > upper_[i]) sign = -1.0;
      xi[i] = x[i] + sign * h;
      double f = 0.0;
      try {
        f = evaluate_policy(p_, xi).objective;
        counts[i] = 1;
      } catch (const IntegrationError&) {
        if (sign < 0.0 || x[i] - h < 0.0) throw;
        sign = -1.0;
        xi[i] = x[i] - h;
        f = evaluate_policy(p_, xi).objective;
        counts[i] = 2;
      }
      g[i] = sign * (f / reference_ - phi_z) / h * scale_[i];
    });
    for (std::size_t c : counts) evaluations_ += c;
    return g;
  }

  struct Run {
    std::vector<double> z;
    double phi = 0.0;
    int iterations = 0;
    double pg_norm = 0.0;
    std::string status;
    std::vector<double> history;
  };

  Run run(const std::vector<double>& z_start) {
    const auto& s = p_.settings;
    Run out;
    std::vector<double> z = project(z_start);
    double f = phi(z);
    std::vector<double> g = gradient(z, f);
    out.history.push_back(f * reference_);

    auto pg_step = [&](double alpha) {
      std::vector<double> y(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i] - alpha * g[i];
      return project(y);
    };

    double pg = inf_norm_diff(pg_step(1.0), z);
    double alpha = std::clamp(1.0 / std::max(pg, 1e-12), 1e-10, 1e3);
    out.status = "iteration limit reached";
    int it = 0;
    for (; it < s.max_iterations; ++it) {
      pg = inf_norm_diff(pg_step(1.0), z);
      if (pg < s.gtol) {
        out.status = "projected gradient below gtol";
        break;
      }
      const std::vector<double> target = pg_step(alpha);
      std::vector<double> d(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) d[i] = target[i] - z[i];
      const double gd = dot(g, d);
      if (!(gd < 0.0)) {
        out.status = "no descent direction";
        break;
      }
      double lambda = 1.0;
      bool accepted = false;
      std::vector<double> zt(z.size());
      double ft = 0.0;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t i = 0; i < z.size(); ++i) zt[i] = z[i] + lambda * d[i];
        try {
          ft = phi(zt);
        } catch (const IntegrationError&) {
          ft = std::numeric_limits<double>::infinity();
        }
        if (ft <= f + 1e-4 * lambda * gd) {
          accepted = true;
          break;
        }
        double next = 0.5 * lambda;
        if (std::isfinite(ft)) {
          const double denom = 2.0 * (ft - f - lambda * gd);
          if (denom > 0.0) {
            next = std::clamp(-gd * lambda * lambda / denom, 0.1 * lambda,
                              0.5 * lambda);
          }
        }
        lambda = next;
      }
      if (!accepted) {
        out.status = "line search stalled";
        break;
      }
      const std::vector<double> gt = gradient(zt, ft);
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double si = zt[i] - z[i];
        ss += si * si;
        sy += si * (gt[i] - g[i]);
      }
      alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e3) : 1e3;
      const double change = std::abs(f - ft);
      z = zt;
      f = ft;
      g = gt;
      out.history.push_back(f * reference_);
      if (change <= s.ftol * std::max(1.0, std::abs(f))) {
        ++it;
        out.status = "relative objective change below ftol";
        break;
      }
    }
    out.z = z;
    out.phi = f;
    out.iterations = it;
    out.pg_norm = inf_norm_diff(pg_step(1.0), z);
    return out;
  }

  std::vector<std::vector<double>> default_starts() const {
    const std::size_t n = dimension();
    std::vector<std::vector<double>> starts;
    starts.emplace_back(n, 0.0);

    std::vector<double> saturate(n);
    for (std::size_t i = 0; i < n; ++i) saturate[i] = std::isfinite(hi_[i]) ? hi_[i] : 1.0;
    starts.push_back(saturate);

    std::vector<double> uniform(n);
    if (std::isfinite(p_.budget)) {
      const double level = p_.budget / std::accumulate(coeff_.begin(), coeff_.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) uniform[i] = level / scale_[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) uniform[i] = 0.5 * saturate[i];
    }
    starts.push_back(uniform);

    std::vector<double> front(n, 0.0);
    double remaining = p_.budget;
    for (std::size_t i = 0; i < n; ++i) {
      const double full = saturate[i];
      const double cost = w_[i] * full;
      if (!std::isfinite(remaining) || cost <= remaining) {
        front[i] = full;
        remaining -= cost;
      } else {
        front[i] = w_[i] > 0.0 ? remaining / w_[i] : full;
        break;
      }
    }
    starts.push_back(front);

    std::mt19937_64 rng(p_.settings.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 4; k < p_.settings.multistart; ++k) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = unit(rng) * saturate[i];
      starts.push_back(r);
    }
    starts.resize(std::min<std::size_t>(starts.size(),
                                        static_cast<std::size_t>(std::max(p_.settings.multistart, 1))));
    return starts;
  }

 private:
  const SingleObjectiveProblem& p_;
  std::vector<double> upper_;
  std::vector<double> coeff_;
  std::vector<double> scale_;
  std::vector<double> hi_;
  std::vector<double> w_;
  double reference_ = 1.0;
  std::size_t evaluations_ = 0;
};

void fill_activity(const SingleObjectiveProblem& p, OptimalPolicy& policy) {
  const auto upper = piece_upper_bounds(p);
  const auto coeff = budget_coefficients(p);
  auto& d = policy.diagnostics;
  d.at_lower.assign(policy.values.size(), false);
  d.at_upper.assign(policy.values.size(), false);
  for (std::size_t i = 0; i < policy.values.size(); ++i) {
    d.at_lower[i] = policy.values[i] <= 0.0;
    d.at_upper[i] = std::isfinite(upper[i]) &&
                    policy.values[i] >= upper[i] * (1.0 - 1e-9);
  }
  if (std::isfinite(p.budget)) {
    const double spent = dot(coeff, policy.values);
    d.budget_active = spent >= p.budget * (1.0 - 1e-6);
  }
}

}  // namespace

OptimalPolicy solve(const SingleObjectiveProblem& problem,
                    std::span<const std::vector<double>> extra_starts) {
  validate(problem);
  ProjectedGradientSolver solver(problem);

  std::vector<std::vector<double>> starts;
  for (const auto& x : extra_starts) {
    if (x.size() != solver.dimension()) {
      throw ValidationError("starting point has the wrong number of pieces");
    }
    starts.push_back(solver.project(solver.to_z(x)));
  }
  for (auto& z : solver.default_starts()) starts.push_back(solver.project(z));

  std::vector<std::vector<double>> unique;
  for (auto& z : starts) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const auto& u) {
      return inf_norm_diff(u, z) < 1e-12;
    });
    if (!seen) unique.push_back(std::move(z));
  }

  bool have_best = false;
  ProjectedGradientSolver::Run best;
  int best_index = 0;
  std::string last_failure;
  for (std::size_t k = 0; k < unique.size(); ++k) {
    ProjectedGradientSolver::Run run;
    try {
      run = solver.run(unique[k]);
    } catch (const IntegrationError& e) {
      last_failure = e.what();
      continue;
    }
    if (!have_best || run.phi < best.phi) {
      best = std::move(run);
      best_index = static_cast<int>(k);
      have_best = true;
    }
  }
  if (!have_best) {
    throw SolverError("every starting point failed to integrate: " + last_failure);
  }
  if (best.status == "iteration limit reached" &&
      problem.settings.fail_on_iteration_limit) {
    throw SolverError(fmt::format("iteration limit ({}) reached",
                                  problem.settings.max_iterations));
  }

  OptimalPolicy policy = evaluate_policy(problem, solver.to_x(best.z));
  policy.diagnostics.iterations = best.iterations;
  policy.diagnostics.objective_evaluations = solver.evaluations();
  policy.diagnostics.projected_gradient_norm = best.pg_norm;
  policy.diagnostics.status = best.status;
  policy.diagnostics.best_start = best_index;
  policy.diagnostics.history = std::move(best.history);
  fill_activity(problem, policy);
  return policy;
}

OptimalPolicy brute_force_oracle(const SingleObjectiveProblem& problem,
                                 int grid_points) {
  validate(problem);
  if (problem.pieces > 3) {
    throw ValidationError("brute-force oracle supports at most 3 pieces");
  }
  if (grid_points < 2) throw ValidationError("grid needs at least 2 points");
  const auto upper = piece_upper_bounds(problem);
  for (double u : upper) {
    if (!std::isfinite(u)) {
      throw ValidationError("brute-force oracle needs finite capacity bounds");
    }
  }
  const auto coeff = budget_coefficients(problem);
  const auto n = static_cast<std::size_t>(problem.pieces);
  const auto g = static_cast<std::size_t>(grid_points);

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= g;

  std::vector<std::vector<double>> points;
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> x(n);
    std::size_t rem = k;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = upper[i] * static_cast<double>(rem % g) / static_cast<double>(g - 1);
      rem /= g;
    }
    if (std::isfinite(problem.budget) && dot(coeff, x) > problem.budget) continue;
    points.push_back(std::move(x));
  }

  std::vector<double> values(points.size(), std::numeric_limits<double>::infinity());
  detail::parallel_for(points.size(), problem.settings.threads, [&](std::size_t k) {
    try {
      values[k] = evaluate_policy(problem, points[k]).objective;
    } catch (const IntegrationError&) {
    }
  });
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  if (!std::isfinite(values[best])) {
    throw SolverError("no grid point could be integrated");
  }
  OptimalPolicy policy = evaluate_policy(problem, points[best]);
  policy.diagnostics.objective_evaluations = points.size();
  policy.diagnostics.status = fmt::format("grid search over {} points", points.size());
  fill_activity(problem, policy);
  return policy;
}

}  // namespace wolbachia
