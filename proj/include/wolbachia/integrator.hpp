#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "wolbachia/release.hpp"
#include "wolbachia/state.hpp"

namespace wolbachia {

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double max_step = 10.0;     // days
  double initial_step = 1e-2;  // days
  std::size_t max_steps = 1'000'000;
  /// Shorten steps so that every integer day is a step endpoint. Dense output
  /// is still recorded.
  bool land_on_days = false;

  bool operator==(const IntegratorConfig&) const = default;
};

/// Continuous extension of one accepted Dormand-Prince step, valid on
/// [t0, t0 + h].
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, kStateSize>, 5> coeffs{};

  StateVector evaluate(double t) const;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Step endpoints of an integration. When `segments` is non-empty,
/// segments[i] interpolates between times[i] and times[i + 1].
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<DenseSegment> segments;
  IntegrationStats stats;
  std::vector<std::string> diagnostics;

  double end_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Adaptive embedded Runge-Kutta 5(4) integration over [0, schedule.horizon()].
/// The integration restarts at every breakpoint of the schedule.
/// Throws IntegrationError on step-count overflow, step-size underflow,
/// non-finite states or a negative compartment beyond round-off.
Trajectory integrate_adaptive(const ModelParameters& params,
                              const StateVector& initial,
                              const ReleaseSchedule& schedule,
                              const IntegratorConfig& config = {});

/// Classical fixed-step RK4. `step` must divide one day; the trajectory holds
/// the integer-day states only.
Trajectory integrate_fixed_rk4(const ModelParameters& params,
                               const StateVector& initial,
                               const ReleaseSchedule& schedule, double step);

/// States at t = 0, 1, ..., horizon. Landed points are returned exactly,
/// others come from the continuous extension. Throws DomainError when the
/// trajectory does not reach `horizon`.
std::vector<StateVector> sample_daily(const Trajectory& traj, int horizon);

}  // namespace wolbachia
