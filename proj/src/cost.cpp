#include "wolbachia/cost.hpp"

#include <cmath>
#include <fmt/format.h>

#include "wolbachia/errors.hpp"

namespace wolbachia {

CostBreakdown objective(const Trajectory& traj, const ReleaseSchedule& schedule,
                        const CostConfig& cc, int horizon,
                        ReleaseAccounting accounting) {
  return objective_from_daily(sample_daily(traj, horizon), schedule, cc, horizon,
                              accounting);
}

CostBreakdown objective_from_daily(const std::vector<StateVector>& daily,
                                   const ReleaseSchedule& schedule,
                                   const CostConfig& cc, int horizon,
                                   ReleaseAccounting accounting) {
  if (schedule.horizon() != horizon) {
    throw DomainError(fmt::format("schedule horizon {} does not match T = {}",
                                  schedule.horizon(), horizon));
  }
  if (daily.size() != static_cast<std::size_t>(horizon) + 1) {
    throw DomainError(fmt::format("expected {} daily states, got {}",
                                  horizon + 1, daily.size()));
  }
  CostBreakdown out;
  out.daily_release.resize(static_cast<std::size_t>(horizon));
  out.daily_societal.resize(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    out.daily_release[i] = cc.release_unit_cost * schedule.evaluate(t);
    out.daily_societal[i] =
        cc.daily_hospital_cost * daily[static_cast<std::size_t>(t)][Compartment::J_h];
    out.release_cost += out.daily_release[i];
    out.societal_cost += out.daily_societal[i];
  }
  if (accounting == ReleaseAccounting::UniformPieceLength) {
    if (const auto* p = std::get_if<PiecewiseRelease>(&schedule.shape())) {
      const int len = piece_length(horizon, static_cast<int>(p->values.size()));
      out.release_cost = 0.0;
      for (double v : p->values) out.release_cost += len * cc.release_unit_cost * v;
    }
  }
  out.total_cost = out.release_cost + out.societal_cost;
  return out;
}

double unit_cost_from_program(double total_program_cost, double weekly_release,
                              double fx) {
  if (!(weekly_release > 0.0)) {
    throw DomainError("weekly release must be positive");
  }
  return total_program_cost * fx / (weekly_release * 52.0);
}

}  // namespace wolbachia
