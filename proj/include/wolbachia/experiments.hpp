#pragma once

#include <string>
#include <vector>

#include "wolbachia/cost.hpp"
#include "wolbachia/integrator.hpp"
#include "wolbachia/optimize.hpp"
#include "wolbachia/release.hpp"
#include "wolbachia/scenario.hpp"

namespace wolbachia {

/// Production ramp used by the capacity and unit-price experiments.
inline constexpr double kRampPeakCapacity = 3.5e6;
inline constexpr double kRampPeakDay = 94.0;
/// Same-peak release level at the baseline population; multiplied by the
/// scenario scale.
inline constexpr double kSchemePeakRelease = 9e6;

struct SimulationResult {
  ReleaseSchedule schedule = ReleaseSchedule::zero(1);
  Trajectory trajectory;
  std::vector<StateVector> daily;  // days 0..T
  CostBreakdown cost;
  double peak_hospitalized = 0.0;  // max J_h over days 0..T
  int peak_day = 0;
};

SimulationResult simulate(const Scenario& s, const ReleaseSchedule& schedule);

/// 1 - peak(run) / peak(baseline).
double peak_reduction(const SimulationResult& baseline, const SimulationResult& run);

struct SchemeResult {
  std::string name;
  ReleaseSchedule schedule = ReleaseSchedule::zero(1);
  double peak_release = 0.0;
  double total_release = 0.0;
  double peak_hospitalized = 0.0;
  int peak_day = 0;
  double reduction = 0.0;  // peak J_h reduction vs no release
};

struct SchemeComparison {
  double baseline_peak = 0.0;
  int baseline_peak_day = 0;
  std::vector<SchemeResult> same_peak;
  std::vector<SchemeResult> same_total;
};

/// constant, linear, bump-50 and bump-100 at unit magnitude.
std::vector<std::pair<std::string, ReleaseSchedule>> standard_schemes(int horizon);

/// kSchemePeakRelease * scale.
double default_scheme_peak(const Scenario& s);

/// Same-peak comparison at `peak`; same-total comparison at `total` (defaults
/// to the total of the constant scheme at `peak`).
SchemeComparison release_scheme_experiment(const Scenario& s, double peak,
                                           double total = 0.0);

struct LadderRung {
  double initial_capacity = 0.0;
  OptimalPolicy policy;
  double peak_hospitalized = 0.0;
  int peak_day = 0;
  double peak_reduction = 0.0;
  double societal_reduction = 0.0;
};

/// Optimal total-cost policy for each initial capacity of a ramp to
/// `peak_capacity` at `peak_day`.
std::vector<LadderRung> capacity_ladder(const Scenario& s,
                                        const std::vector<double>& initial_capacities,
                                        double peak_capacity = kRampPeakCapacity,
                                        double peak_day = kRampPeakDay);

struct TableCell {
  double unit_price = 0.0;
  double initial_capacity = 0.0;
  double total_release = 0.0;
  double release_cost = 0.0;
  double societal_cost = 0.0;
  double total_cost = 0.0;
  std::vector<double> policy;
};

struct TableResult {
  std::string name;
  std::vector<TableCell> cells;
};

/// unit-price-1M, unit-price-500k, total-cost.
std::vector<std::string> table_names();
inline const std::vector<double> kTableUnitPrices = {4.85, 4.00, 3.00, 2.00};

/// Throws ValidationError for unknown names.
TableResult table_experiment(const Scenario& s, const std::string& name);

/// Total release sum_{t=1..T} r(t) of a piecewise policy.
double policy_total_release(const std::vector<double>& values, int horizon);

}  // namespace wolbachia
