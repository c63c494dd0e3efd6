#include <doctest.h>

#include <cmath>
#include <random>

#include "wolbachia/errors.hpp"
#include "wolbachia/experiments.hpp"
#include "wolbachia/pareto.hpp"
#include "wolbachia/scenario.hpp"

using namespace wolbachia;

namespace {

ParetoPoint pt(int k, double release, double societal) {
  ParetoPoint p;
  p.k = k;
  p.budget_cap = release;
  p.release_cost = release;
  p.societal_cost = societal;
  return p;
}

// Independent O(n^2) check: i survives iff no other point is at least as good
// in both costs and strictly better in one (or an identical earlier one).
std::vector<int> survivors_oracle(const std::vector<ParetoPoint>& pts) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const bool le = pts[j].release_cost <= pts[i].release_cost &&
                      pts[j].societal_cost <= pts[i].societal_cost;
      const bool lt = pts[j].release_cost < pts[i].release_cost ||
                      pts[j].societal_cost < pts[i].societal_cost;
      if (le && (lt || j < i)) beaten = true;
    }
    if (!beaten) out.push_back(pts[i].k);
  }
  return out;
}

SingleObjectiveProblem short_problem() {
  Scenario s = preset("quezon-city");
  s.horizon = 120;
  s.pieces = 4;
  s.capacity = CapacityFunction::ramp(5e5, 3.5e6, 94);
  return make_problem(s);
}

}  // namespace

TEST_CASE("budget caps") {
  const auto caps = budget_caps(100, 5e8);
  REQUIRE(caps.size() == 100);
  CHECK(caps.front() == 0.0);
  CHECK(caps.back() == 5e8);
  CHECK(caps[1] - caps[0] == doctest::Approx(5'050'505.05).epsilon(1e-9));
  CHECK_THROWS_AS(budget_caps(1, 5e8), ValidationError);
  CHECK_THROWS_AS(budget_caps(10, 0), ValidationError);
}

TEST_CASE("filter_dominated") {
  ParetoFront single;
  single.points = {pt(1, 1, 1)};
  CHECK(filter_dominated(single).frontier().size() == 1);

  ParetoFront tie;
  tie.points = {pt(1, 5, 10), pt(2, 3, 10)};
  const auto f = filter_dominated(tie).frontier();
  REQUIRE(f.size() == 1);
  CHECK(f[0].k == 2);

  ParetoFront five;
  five.points = {pt(1, 0, 100), pt(2, 10, 60), pt(3, 20, 70), pt(4, 30, 30), pt(5, 40, 10)};
  const auto filtered = filter_dominated(five);
  std::vector<int> kept;
  for (const auto& p : filtered.frontier()) kept.push_back(p.k);
  CHECK(kept.size() == 4);
  CHECK(kept == survivors_oracle(five.points));

  ParetoFront none;
  CHECK_THROWS_AS(filter_dominated(none), ValidationError);
}

TEST_CASE("dominance filter agrees with the oracle on random sets") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> d(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    ParetoFront f;
    for (int i = 1; i <= 12; ++i) f.points.push_back(pt(i, d(rng), d(rng)));
    std::vector<int> kept;
    for (const auto& p : filter_dominated(f).frontier()) kept.push_back(p.k);
    CHECK(kept == survivors_oracle(f.points));
  }
}

TEST_CASE("sweep properties") {
  const auto base = short_problem();
  const SweepOptions opts{6, 2e8, true};
  const auto front = epsilon_constraint_sweep(base, opts);
  REQUIRE(front.points.size() == 6);
  CHECK(front.failed_count() == 0);

  const auto& first = front.points.front();
  CHECK(first.budget_cap == 0.0);
  for (double v : first.policy) CHECK(v == 0.0);
  Scenario s = preset("quezon-city");
  s.horizon = 120;
  s.pieces = 4;
  const auto zero = simulate(s, ReleaseSchedule::zero(120));
  CHECK(first.societal_cost == doctest::Approx(zero.cost.societal_cost).epsilon(1e-12));

  for (std::size_t i = 0; i < front.points.size(); ++i) {
    const auto& p = front.points[i];
    CHECK(p.release_cost <= p.budget_cap * (1 + 1e-6) + 1e-6);
    if (i > 0) CHECK(p.societal_cost <= front.points[i - 1].societal_cost * (1 + 1e-3));
  }

  const auto staircase = front.frontier();
  for (std::size_t i = 1; i < staircase.size(); ++i) {
    CHECK(staircase[i].societal_cost < staircase[i - 1].societal_cost);
    CHECK(staircase[i].release_cost > staircase[i - 1].release_cost);
  }

  // Point k reproduces a direct societal-only solve at the same cap.
  auto direct = base;
  direct.objective = ObjectiveKind::SocietalOnly;
  direct.budget = front.points[3].budget_cap;
  const double reference = solve(direct).cost.societal_cost;
  CHECK(std::abs(front.points[3].societal_cost - reference) / reference < 5e-3);

  const auto cold = epsilon_constraint_sweep(base, {6, 2e8, false});
  for (std::size_t i = 0; i < cold.points.size(); ++i) {
    const double w = front.points[i].societal_cost;
    CHECK(std::abs(cold.points[i].societal_cost - w) / w < 5e-3);
  }
  for (const auto& c : verify_cold_start(base, front, 3, 1)) CHECK(c.relative_gap < 5e-3);
}
