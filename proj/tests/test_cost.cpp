#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "wolbachia/cost.hpp"
#include "wolbachia/errors.hpp"

using namespace wolbachia;
using enum Compartment;

namespace {

std::vector<StateVector> flat_states(int horizon, double jh) {
  StateVector s;
  s[S_h] = 1.0;
  s[J_h] = jh;
  return std::vector<StateVector>(static_cast<std::size_t>(horizon) + 1, s);
}

}  // namespace

TEST_CASE("zero schedule with no infections costs nothing") {
  const auto c = objective_from_daily(flat_states(365, 0.0), ReleaseSchedule::zero(365),
                                      CostConfig{}, 365, ReleaseAccounting::PerDay);
  CHECK(c.release_cost == 0.0);
  CHECK(c.societal_cost == 0.0);
  CHECK(c.total_cost == 0.0);
}

TEST_CASE("constant release cost") {
  const auto c = objective_from_daily(flat_states(365, 0.0),
                                      ReleaseSchedule(ConstantRelease{1e6}, 365), CostConfig{},
                                      365, ReleaseAccounting::PerDay);
  CHECK(c.release_cost == doctest::Approx(1'770'250'000.0).epsilon(1e-15));
}

TEST_CASE("day zero is excluded") {
  auto states = flat_states(3, 1.0);
  states[0][J_h] = 1e9;
  const auto c = objective_from_daily(states, ReleaseSchedule::zero(3), CostConfig{}, 3,
                                      ReleaseAccounting::PerDay);
  CHECK(c.societal_cost == doctest::Approx(3 * 3401.52));
}

TEST_CASE("uniform piece length accounting overstates the short last piece") {
  const ReleaseSchedule s(PiecewiseRelease{std::vector<double>(12, 100.0)}, 365);
  const auto per_day = objective_from_daily(flat_states(365, 0), s, CostConfig{}, 365,
                                            ReleaseAccounting::PerDay);
  const auto uniform = objective_from_daily(flat_states(365, 0), s, CostConfig{}, 365,
                                            ReleaseAccounting::UniformPieceLength);
  CHECK(uniform.release_cost - per_day.release_cost == doctest::Approx(7 * 100 * 4.85));
}

TEST_CASE("cost properties on a simulated trajectory") {
  const auto p = fixtures::default_params();
  const ReleaseSchedule s(PiecewiseRelease{{3e6, 1e6, 0, 0}}, 365);
  const auto traj = integrate_adaptive(p, baseline_initial_state(), s);
  CostConfig cc;
  const auto full = objective(traj, s, cc, 365);
  CHECK(full.total_cost == full.release_cost + full.societal_cost);

  // Additivity over a split of the day range.
  double head = 0.0, tail = 0.0;
  for (int t = 1; t <= 365; ++t) {
    const double v = full.daily_release[static_cast<std::size_t>(t - 1)] +
                     full.daily_societal[static_cast<std::size_t>(t - 1)];
    (t <= 120 ? head : tail) += v;
  }
  CHECK(head + tail == doctest::Approx(full.total_cost).epsilon(1e-14));

  CostConfig cheaper = cc;
  cheaper.release_unit_cost = 1.0;
  const auto c2 = objective(traj, s, cheaper, 365);
  CHECK(c2.societal_cost == full.societal_cost);
  CHECK(c2.release_cost == doctest::Approx(full.release_cost / 4.85).epsilon(1e-14));

  CostConfig dearer = cc;
  dearer.daily_hospital_cost *= 3.0;
  CHECK(objective(traj, s, dearer, 365).societal_cost ==
        doctest::Approx(3.0 * full.societal_cost).epsilon(1e-14));

  CHECK_THROWS_AS(objective(traj, s, cc, 300), DomainError);
}

TEST_CASE("unit cost from a program") {
  CHECK(unit_cost_from_program(364, 7, 1) == doctest::Approx(1.0));
  const double fx = 4.85 * 7e6 * 52 / 40e6;
  CHECK(unit_cost_from_program(40e6, 7e6, fx) == doctest::Approx(4.85).epsilon(1e-14));
  CHECK(unit_cost_from_program(40e6, 14e6, fx) == doctest::Approx(4.85 / 2).epsilon(1e-14));
  CHECK_THROWS_AS(unit_cost_from_program(1, 0, 1), DomainError);
}
