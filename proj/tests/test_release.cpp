#include <doctest.h>

#include <cmath>

#include "wolbachia/errors.hpp"
#include "wolbachia/release.hpp"

using namespace wolbachia;

TEST_CASE("evaluate: formulas") {
  const ReleaseSchedule linear(LinearDecreasingRelease{1000}, 365);
  CHECK(linear.evaluate(365) == 0.0);
  CHECK(linear.evaluate(0) == doctest::Approx(2000.0).epsilon(1e-15));
  const ReleaseSchedule bump(BumpRelease{1000, 50}, 365);
  CHECK(bump.evaluate(50) == 1000.0);
  CHECK(bump.evaluate(150) == doctest::Approx(1000.0 / std::cosh(1.0)).epsilon(1e-14));
  const ReleaseSchedule constant(ConstantRelease{7}, 10);
  CHECK(constant.evaluate(3.5) == 7.0);
  CHECK_THROWS_AS(constant.evaluate(-0.1), DomainError);
  CHECK_THROWS_AS(constant.evaluate(10.5), DomainError);
}

TEST_CASE("linear generalizes to other horizons") {
  const ReleaseSchedule linear(LinearDecreasingRelease{10}, 100);
  CHECK(linear.evaluate(0) == doctest::Approx(20.0));
  CHECK(linear.evaluate(50) == doctest::Approx(10.0));
  CHECK(linear.evaluate(100) == 0.0);
}

TEST_CASE("piece convention") {
  CHECK(piece_length(365, 12) == 31);
  CHECK(piece_index(31, 365, 12) == 1);
  CHECK(piece_index(32, 365, 12) == 2);
  CHECK(piece_index(0, 365, 12) == 1);
  CHECK(piece_index(365, 365, 12) == 12);
  const auto counts = piece_day_counts(365, 12);
  CHECK(counts.front() == 31);
  CHECK(counts.back() == 24);
  int total = 0;
  for (int c : counts) total += c;
  CHECK(total == 365);

  std::vector<double> values(12);
  for (int i = 0; i < 12; ++i) values[static_cast<std::size_t>(i)] = i + 1.0;
  const ReleaseSchedule s(PiecewiseRelease{values}, 365);
  for (int i = 1; i < 12; ++i) {
    for (double eps : {1e-9, 0.25, 0.999}) {
      CHECK(s.evaluate(31.0 * i + eps) == i + 1.0);
    }
    CHECK(s.evaluate(31.0 * i) == static_cast<double>(i));
  }
  const auto bps = s.breakpoints();
  REQUIRE(bps.size() == 11);
  CHECK(bps.front() == 31.0);
  CHECK(bps.back() == 341.0);
}

TEST_CASE("piecewise validation") {
  CHECK_THROWS_AS(ReleaseSchedule(PiecewiseRelease{{}}, 10), ValidationError);
  CHECK_THROWS_AS(ReleaseSchedule(PiecewiseRelease{{1, -1}}, 10), ValidationError);
  CHECK_THROWS_AS(ReleaseSchedule(ConstantRelease{-1}, 10), ValidationError);
  CHECK_THROWS_AS(ReleaseSchedule(PiecewiseRelease{{1, 2, 3, 4}}, 6), ValidationError);
}

TEST_CASE("smooth shapes have no breakpoints") {
  CHECK(ReleaseSchedule(BumpRelease{1, 50}, 365).breakpoints().empty());
  CHECK(ReleaseSchedule(LinearDecreasingRelease{1}, 365).breakpoints().empty());
}

TEST_CASE("total_release") {
  CHECK(total_release(ReleaseSchedule(ConstantRelease{100}, 10)) == 1000.0);
  CHECK(total_release(ReleaseSchedule(PiecewiseRelease{{100, 0}}, 10)) == 500.0);
  // Sum over t = 1..T of 2m (T - t) / T = m (T - 1).
  const double m = 1000.0;
  CHECK(total_release(ReleaseSchedule(LinearDecreasingRelease{m}, 365)) ==
        doctest::Approx(m * 364.0).epsilon(1e-12));
  const ReleaseSchedule b(BumpRelease{3, 50}, 365);
  CHECK(total_release(b.scaled(4.0)) == doctest::Approx(4.0 * total_release(b)).epsilon(1e-14));
}

TEST_CASE("normalize_same_peak") {
  const std::vector<ReleaseSchedule> in = {
      ReleaseSchedule(ConstantRelease{500}, 365),
      ReleaseSchedule(BumpRelease{2000, 50}, 365),
      ReleaseSchedule(LinearDecreasingRelease{123}, 365),
      ReleaseSchedule(BumpRelease{7, 100}, 365),
  };
  const auto out = normalize_same_peak(in, 1000);
  CHECK(std::get<ConstantRelease>(out[0].shape()).level == doctest::Approx(1000));
  CHECK(std::get<BumpRelease>(out[1].shape()).magnitude == doctest::Approx(1000));
  CHECK(std::get<LinearDecreasingRelease>(out[2].shape()).magnitude == doctest::Approx(500));
  for (const auto& s : out) CHECK(std::abs(s.peak() - 1000.0) / 1000.0 < 1e-12);
  CHECK_THROWS_AS(normalize_same_peak({ReleaseSchedule(ConstantRelease{0}, 10)}, 1.0),
                  ValidationError);
}

TEST_CASE("normalize_same_total") {
  const auto out = normalize_same_total(
      {ReleaseSchedule(ConstantRelease{1}, 365), ReleaseSchedule(BumpRelease{1, 50}, 365),
       ReleaseSchedule(LinearDecreasingRelease{1}, 365)},
      365000);
  CHECK(std::get<ConstantRelease>(out[0].shape()).level == doctest::Approx(1000));
  double sech_sum = 0.0;
  for (int t = 1; t <= 365; ++t) sech_sum += 1.0 / std::cosh(0.01 * (t - 50));
  CHECK(std::get<BumpRelease>(out[1].shape()).magnitude ==
        doctest::Approx(365000.0 / sech_sum).epsilon(1e-12));
  for (const auto& s : out) CHECK(std::abs(total_release(s) - 365000.0) / 365000.0 < 1e-12);
}

TEST_CASE("describe and parse round-trip") {
  for (const std::string spec :
       {"constant:1000", "linear:0.5", "bump:12.25@100", "piecewise:1,0,3.5", "constant:0"}) {
    CHECK(ReleaseSchedule::parse(spec, 365).describe() == spec);
  }
  CHECK(ReleaseSchedule::parse("zero", 10) == ReleaseSchedule::zero(10));
  CHECK_THROWS_AS(ReleaseSchedule::parse("weird:1", 10), ValidationError);
  CHECK_THROWS_AS(ReleaseSchedule::parse("constant", 10), ValidationError);
  CHECK_THROWS_AS(ReleaseSchedule::parse("constant:abc", 10), ValidationError);
}
