#include "wolbachia/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "wolbachia/errors.hpp"

namespace wolbachia {

std::vector<ParetoPoint> ParetoFront::frontier() const {
  std::vector<ParetoPoint> out;
  for (const auto& p : points) {
    if (!p.failed && !p.dominated) out.push_back(p);
  }
  return out;
}

std::size_t ParetoFront::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const auto& p) { return p.failed; }));
}

std::vector<double> budget_caps(int count, double max_budget) {
  if (count < 2) throw ValidationError("sweep needs K >= 2");
  if (!(max_budget > 0.0) || !std::isfinite(max_budget)) {
    throw ValidationError("sweep needs a finite B_max > 0");
  }
  std::vector<double> caps(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    caps[static_cast<std::size_t>(k - 1)] = (k - 1) * max_budget / (count - 1);
  }
  caps.back() = max_budget;
  return caps;
}

namespace {

SingleObjectiveProblem point_problem(const SingleObjectiveProblem& base, double cap) {
  SingleObjectiveProblem p = base;
  p.objective = ObjectiveKind::SocietalOnly;
  p.budget = cap;
  return p;
}

ParetoPoint solve_point(const SingleObjectiveProblem& base, int k, double cap,
                        std::span<const std::vector<double>> starts) {
  ParetoPoint point;
  point.k = k;
  point.budget_cap = cap;
  try {
    const OptimalPolicy policy = solve(point_problem(base, cap), starts);
    point.release_cost = policy.cost.release_cost;
    point.societal_cost = policy.cost.societal_cost;
    point.policy = policy.values;
  } catch (const SolverError& e) {
    point.failed = true;
    point.failure = e.what();
  } catch (const IntegrationError& e) {
    point.failed = true;
    point.failure = e.what();
  }
  return point;
}

}  // namespace

ParetoPoint solve_cold(const SingleObjectiveProblem& base, int k, double budget_cap) {
  return solve_point(base, k, budget_cap, {});
}

ParetoFront epsilon_constraint_sweep(const SingleObjectiveProblem& base,
                                     const SweepOptions& options) {
  const auto caps = budget_caps(options.count, options.max_budget);
  validate(point_problem(base, 0.0));
  ParetoFront front;
  if (!options.warm_start) {
    // Independent points: parallel across the sweep, sequential inside.
    SingleObjectiveProblem inner = base;
    inner.settings.threads = 1;
    front.points.resize(caps.size());
    detail::parallel_for(caps.size(), base.settings.threads, [&](std::size_t i) {
      front.points[i] = solve_point(inner, static_cast<int>(i) + 1, caps[i], {});
    });
    return filter_dominated(std::move(front));
  }
  front.points.reserve(caps.size());
  std::vector<std::vector<double>> warm;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    ParetoPoint point = solve_point(base, k, caps[i], warm);
    if (!point.failed) warm = {point.policy};
    front.points.push_back(std::move(point));
  }
  return filter_dominated(std::move(front));
}

ParetoFront filter_dominated(ParetoFront front) {
  if (front.points.empty()) throw ValidationError("no points to filter");
  auto& pts = front.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].dominated = false;
    if (pts[i].failed) continue;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j || pts[j].failed) continue;
      const bool weakly = pts[j].release_cost <= pts[i].release_cost &&
                          pts[j].societal_cost <= pts[i].societal_cost;
      const bool identical = pts[j].release_cost == pts[i].release_cost &&
                             pts[j].societal_cost == pts[i].societal_cost;
      if (weakly && (!identical || j < i)) {
        pts[i].dominated = true;
        break;
      }
    }
  }
  return front;
}

std::vector<ColdCheck> verify_cold_start(const SingleObjectiveProblem& base,
                                         const ParetoFront& front, int samples,
                                         std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < front.points.size(); ++i) {
    if (!front.points[i].failed) candidates.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min<std::size_t>(candidates.size(),
                                          static_cast<std::size_t>(std::max(samples, 0))));
  std::sort(candidates.begin(), candidates.end());

  std::vector<ColdCheck> out;
  for (std::size_t i : candidates) {
    const auto& warm = front.points[i];
    const ParetoPoint cold = solve_cold(base, warm.k, warm.budget_cap);
    ColdCheck c;
    c.k = warm.k;
    c.warm = warm.societal_cost;
    c.cold = cold.failed ? std::numeric_limits<double>::infinity() : cold.societal_cost;
    c.relative_gap = std::abs(c.warm - c.cold) / std::max(std::abs(c.cold), 1.0);
    out.push_back(c);
  }
  return out;
}

}  // namespace wolbachia
