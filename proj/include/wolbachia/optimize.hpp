#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wolbachia/cost.hpp"
#include "wolbachia/integrator.hpp"
#include "wolbachia/state.hpp"

namespace wolbachia {

/// Production capacity P(t) on days 1..T.
struct CapacityFunction {
  enum class Kind { Ramp, Table };

  Kind kind = Kind::Ramp;
  // Ramp: P(1) = initial, linear up to `peak` at `peak_day`, constant after.
  double initial = std::numeric_limits<double>::infinity();
  double peak = std::numeric_limits<double>::infinity();
  double peak_day = 1.0;
  // Table: values[d - 1] = P(d).
  std::vector<double> table;

  static CapacityFunction constant(double value) {
    return {Kind::Ramp, value, value, 1.0, {}};
  }
  static CapacityFunction ramp(double initial, double peak, double peak_day) {
    return {Kind::Ramp, initial, peak, peak_day, {}};
  }
  static CapacityFunction tabulated(std::vector<double> values) {
    return {Kind::Table, 0.0, 0.0, 1.0, std::move(values)};
  }

  double max_value() const;
  bool operator==(const CapacityFunction&) const = default;
};

/// P(t) for t >= 1. Throws DomainError outside the defined range.
double capacity_at(const CapacityFunction& c, double t);

/// Throws ValidationError if the capacity is negative, unbounded in the wrong
/// way, or a ramp decreases.
void validate(const CapacityFunction& c);

enum class ObjectiveKind {
  /// release cost + societal cost
  Total,
  /// societal cost alone (release cost only enters through the budget)
  SocietalOnly,
};

enum class CapacityBoundMode {
  /// r_i <= P(l (i-1) + 1)
  PieceStart,
  /// r_i <= min of P over the days of piece i
  PieceMinimum,
};

struct SolverSettings {
  double gtol = 1e-6;
  double ftol = 1e-9;
  int max_iterations = 200;
  /// Number of starting points; the first four are fixed (zero, capacity
  /// saturating, budget uniform, front loaded) and the rest are random.
  int multistart = 4;
  double fd_relative_step = 1e-3;
  double fd_min_step = 1.0;
  std::uint64_t seed = 0;
  /// Worker threads for gradient evaluation; 0 = hardware concurrency.
  unsigned threads = 0;
  /// Throw SolverError instead of returning the last iterate when the
  /// iteration limit is hit.
  bool fail_on_iteration_limit = false;

  bool operator==(const SolverSettings&) const = default;
};

struct SingleObjectiveProblem {
  ModelParameters params;
  StateVector initial;
  int horizon = 365;
  int pieces = 12;
  CostConfig cost;
  CapacityFunction capacity;
  double budget = std::numeric_limits<double>::infinity();
  IntegratorConfig integrator;
  ObjectiveKind objective = ObjectiveKind::Total;
  ReleaseAccounting accounting = ReleaseAccounting::PerDay;
  CapacityBoundMode bound_mode = CapacityBoundMode::PieceStart;
  SolverSettings settings;
};

struct SolverDiagnostics {
  int iterations = 0;
  std::size_t objective_evaluations = 0;
  double projected_gradient_norm = 0.0;
  std::string status;
  int best_start = 0;
  /// Objective at each accepted iterate of the winning start.
  std::vector<double> history;
  std::vector<bool> at_lower;
  std::vector<bool> at_upper;
  bool budget_active = false;
};

struct OptimalPolicy {
  std::vector<double> values;  // release level per piece
  CostBreakdown cost;
  double objective = 0.0;      // value of the optimized functional
  SolverDiagnostics diagnostics;
};

/// Upper bound of each piece under the problem's bound mode.
std::vector<double> piece_upper_bounds(const SingleObjectiveProblem& problem);

/// Budget coefficient of each piece: sum_i coeff_i r_i <= budget.
std::vector<double> budget_coefficients(const SingleObjectiveProblem& problem);

/// Simulates `values` and evaluates costs (the objective is chosen by the
/// problem's ObjectiveKind).
OptimalPolicy evaluate_policy(const SingleObjectiveProblem& problem,
                              std::vector<double> values);

/// Local minimizer from several starting points; returns the best one.
/// `extra_starts` are tried first (after projection onto the feasible set).
OptimalPolicy solve(const SingleObjectiveProblem& problem,
                    std::span<const std::vector<double>> extra_starts = {});

/// Exhaustive search over a regular grid (grid_points per piece) restricted to
/// the feasible set. Only for pieces <= 3.
OptimalPolicy brute_force_oracle(const SingleObjectiveProblem& problem,
                                 int grid_points);

/// Throws ValidationError when the problem is malformed.
void validate(const SingleObjectiveProblem& problem);

}  // namespace wolbachia
