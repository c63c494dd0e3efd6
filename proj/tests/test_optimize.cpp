#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/optimize.hpp"
#include "wolbachia/scenario.hpp"

using namespace wolbachia;

namespace {

// Quezon-City scale, 120 days, 4 pieces of 30 days.
SingleObjectiveProblem small_problem() {
  Scenario s = preset("quezon-city");
  s.horizon = 120;
  s.pieces = 4;
  s.capacity = CapacityFunction::constant(2e6);
  return make_problem(s);
}

}  // namespace

TEST_CASE("capacity_at") {
  const auto ramp = CapacityFunction::ramp(1e6, 3.5e6, 94);
  CHECK(capacity_at(ramp, 94) == doctest::Approx(3.5e6));
  CHECK(capacity_at(ramp, 200) == doctest::Approx(3.5e6));
  CHECK(capacity_at(ramp, 1) == 1e6);
  CHECK(capacity_at(ramp, 47.5) == doctest::Approx(2.25e6));
  CHECK_THROWS_AS(capacity_at(ramp, 0.5), DomainError);
  CHECK(capacity_at(CapacityFunction::constant(7), 300) == 7);
  const auto table = CapacityFunction::tabulated({1, 2, 3});
  CHECK(capacity_at(table, 2) == 2);
  CHECK_THROWS_AS(capacity_at(table, 4), DomainError);
  CHECK_THROWS_AS(validate(CapacityFunction::ramp(2, 1, 10)), ValidationError);
  CHECK_THROWS_AS(validate(CapacityFunction::constant(-1)), ValidationError);
  CHECK_THROWS_AS(validate(CapacityFunction::tabulated({})), ValidationError);
}

TEST_CASE("piece bounds and budget coefficients") {
  SingleObjectiveProblem p = small_problem();
  p.capacity = CapacityFunction::ramp(1e6, 3.5e6, 94);
  const auto start = piece_upper_bounds(p);
  REQUIRE(start.size() == 4);
  CHECK(start[0] == 1e6);
  CHECK(start[1] == doctest::Approx(capacity_at(p.capacity, 31)));
  p.bound_mode = CapacityBoundMode::PieceMinimum;
  CHECK(piece_upper_bounds(p) == start);

  std::vector<double> dip(120, 5.0);
  dip[40] = 1.0;
  p.capacity = CapacityFunction::tabulated(dip);
  CHECK(piece_upper_bounds(p)[1] == 1.0);
  p.bound_mode = CapacityBoundMode::PieceStart;
  CHECK(piece_upper_bounds(p)[1] == 5.0);

  p.horizon = 365;
  p.pieces = 12;
  p.capacity = CapacityFunction::constant(1);
  const auto coeff = budget_coefficients(p);
  CHECK(coeff.front() == doctest::Approx(31 * 4.85));
  CHECK(coeff.back() == doctest::Approx(24 * 4.85));
  p.accounting = ReleaseAccounting::UniformPieceLength;
  CHECK(budget_coefficients(p).back() == doctest::Approx(31 * 4.85));
}

TEST_CASE("problem validation") {
  auto p = small_problem();
  CHECK_NOTHROW(validate(p));
  auto q = p;
  q.horizon = 6;
  q.pieces = 4;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.budget = -1;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.pieces = 0;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.capacity = CapacityFunction::tabulated({1, 2});
  CHECK_THROWS_AS(validate(q), ValidationError);
}

TEST_CASE("free hospital care makes every release wasteful") {
  auto p = small_problem();
  p.cost.daily_hospital_cost = 0.0;
  const auto sol = solve(p);
  for (double v : sol.values) CHECK(v == 0.0);
  p.pieces = 2;
  p.horizon = 60;
  const auto grid = brute_force_oracle(p, 5);
  for (double v : grid.values) CHECK(v == 0.0);
}

TEST_CASE("solver result is feasible, monotone and deterministic") {
  auto p = small_problem();
  p.budget = 2e8;
  p.settings.multistart = 6;
  p.settings.seed = 7;
  const auto a = solve(p);
  const auto upper = piece_upper_bounds(p);
  const auto coeff = budget_coefficients(p);
  double spent = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] >= 0.0);
    CHECK(a.values[i] <= upper[i] * (1 + 1e-6));
    spent += coeff[i] * a.values[i];
  }
  CHECK(spent <= p.budget * (1 + 1e-6));
  CHECK(a.diagnostics.budget_active);
  for (std::size_t i = 1; i < a.diagnostics.history.size(); ++i) {
    CHECK(a.diagnostics.history[i] <= a.diagnostics.history[i - 1]);
  }
  const auto b = solve(p);
  CHECK(a.values == b.values);
  CHECK(a.objective == b.objective);
  auto threaded = p;
  threaded.settings.threads = 3;
  CHECK(solve(threaded).values == a.values);
}

TEST_CASE("relaxing the budget never hurts") {
  auto p = small_problem();
  double previous = std::numeric_limits<double>::infinity();
  for (double budget : {0.0, 5e7, 1e8, 2e8, 4e8}) {
    p.budget = budget;
    const double total = solve(p).cost.total_cost;
    CHECK(total <= previous * (1 + 1e-9));
    previous = total;
  }
}

TEST_CASE("raising the initial capacity never hurts") {
  Scenario s = preset("quezon-city");
  s.horizon = 120;
  s.pieces = 4;
  double previous = std::numeric_limits<double>::infinity();
  for (double p0 : {2e5, 7e5, 1e6}) {
    s.capacity = CapacityFunction::ramp(p0, 3.5e6, 94);
    const double total = solve(make_problem(s)).objective;
    CHECK(total <= previous * (1 + 1e-9));
    previous = total;
  }
}

TEST_CASE("solver matches a grid search on two pieces") {
  auto p = small_problem();
  p.horizon = 60;
  p.pieces = 2;
  p.capacity = CapacityFunction::constant(1e6);
  const auto sol = solve(p);
  const auto grid = brute_force_oracle(p, 11);
  CHECK(sol.objective <= grid.objective * 1.01);
}

TEST_CASE("grid search converges under refinement") {
  auto p = small_problem();
  p.horizon = 30;
  p.pieces = 1;
  p.capacity = CapacityFunction::constant(4e6);
  const auto coarse = brute_force_oracle(p, 11);
  const auto fine = brute_force_oracle(p, 101);
  CHECK(fine.objective <= coarse.objective);
  CHECK(std::abs(fine.values[0] - coarse.values[0]) <= 4e6 / 10);
  CHECK_THROWS_AS(brute_force_oracle(small_problem(), 3), ValidationError);
}

TEST_CASE("extra starts must match the piece count") {
  const auto p = small_problem();
  const std::vector<std::vector<double>> bad = {{1.0}};
  CHECK_THROWS_AS(solve(p, bad), ValidationError);
}

TEST_CASE("iteration limit can be made fatal") {
  auto p = small_problem();
  p.settings.max_iterations = 1;
  p.settings.ftol = 0;
  p.settings.gtol = 0;
  p.settings.fail_on_iteration_limit = true;
  CHECK_THROWS_AS(solve(p), SolverError);
}
