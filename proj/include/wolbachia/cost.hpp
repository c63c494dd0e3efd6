#pragma once

#include <string>
#include <vector>

#include "wolbachia/integrator.hpp"
#include "wolbachia/release.hpp"

namespace wolbachia {

struct CostConfig {
  double release_unit_cost = 4.85;       // currency per mosquito released
  double daily_hospital_cost = 3401.52;  // currency per hospitalized person-day
  std::string currency = "PHP";

  bool operator==(const CostConfig&) const = default;
};

/// How release cost is charged for piecewise schedules.
enum class ReleaseAccounting {
  /// Sum over actual days t = 1..T of C_r r(t).
  PerDay,
  /// Every piece charged l = ceil(T/N) days, as in the reparameterized
  /// problem; overstates a truncated last piece.
  UniformPieceLength,
};

struct CostBreakdown {
  double release_cost = 0.0;
  double societal_cost = 0.0;
  double total_cost = 0.0;
  std::vector<double> daily_release;   // index d-1 holds day d
  std::vector<double> daily_societal;  // index d-1 holds day d
};

/// Release and hospitalization cost over days 1..T (day 0 excluded). J_h is
/// read from the daily samples of the trajectory.
CostBreakdown objective(const Trajectory& traj, const ReleaseSchedule& schedule,
                        const CostConfig& cc, int horizon,
                        ReleaseAccounting accounting = ReleaseAccounting::PerDay);

/// Same, from already-sampled daily states (size horizon + 1).
CostBreakdown objective_from_daily(const std::vector<StateVector>& daily,
                                   const ReleaseSchedule& schedule,
                                   const CostConfig& cc, int horizon,
                                   ReleaseAccounting accounting);

/// Per-mosquito cost of a program: total_cost * fx / (weekly_release * 52).
double unit_cost_from_program(double total_program_cost, double weekly_release,
                              double fx);

}  // namespace wolbachia
