#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wolbachia/optimize.hpp"

namespace wolbachia {

struct ParetoPoint {
  int k = 0;                   // 1-based sweep index
  double budget_cap = 0.0;     // release-cost cap for this point
  double release_cost = 0.0;   // achieved
  double societal_cost = 0.0;  // achieved
  std::vector<double> policy;
  bool failed = false;
  std::string failure;         // solver message when failed
  bool dominated = false;
};

struct ParetoFront {
  /// Sorted by budget_cap ascending.
  std::vector<ParetoPoint> points;

  /// Points that did not fail and are not dominated, in sweep order.
  std::vector<ParetoPoint> frontier() const;
  std::size_t failed_count() const;
};

struct SweepOptions {
  int count = 100;           // K
  double max_budget = 5e8;   // B_max
  bool warm_start = true;
};

/// Caps B_k = (k - 1) B_max / (K - 1), k = 1..K.
std::vector<double> budget_caps(int count, double max_budget);

/// Minimizes societal cost under each budget cap. `base` supplies model,
/// capacity, pieces and solver settings; its objective and budget are
/// overridden. Failed points are marked and skipped.
ParetoFront epsilon_constraint_sweep(const SingleObjectiveProblem& base,
                                     const SweepOptions& options);

/// Single point of the sweep solved from the default starts only.
ParetoPoint solve_cold(const SingleObjectiveProblem& base, int k,
                       double budget_cap);

/// Marks points weakly dominated in (release_cost, societal_cost). Among
/// identical points the first is kept. Failed points are ignored.
ParetoFront filter_dominated(ParetoFront front);

/// Relative objective gap between warm-started points and cold re-solves for
/// `samples` randomly chosen k.
struct ColdCheck {
  int k = 0;
  double warm = 0.0;
  double cold = 0.0;
  double relative_gap = 0.0;
};
std::vector<ColdCheck> verify_cold_start(const SingleObjectiveProblem& base,
                                         const ParetoFront& front, int samples,
                                         std::uint64_t seed);

}  // namespace wolbachia
