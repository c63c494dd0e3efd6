#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/model.hpp"
#include "wolbachia/scenario.hpp"

using namespace wolbachia;
using enum Compartment;

namespace {

// Plain-array transcription of the model equations, written independently of
// src/model.cpp. Index order: S_h I_h J_h R_h Mw M Svfw Svf Svfpw Svfp Svfps
// Ivfw Ivf Ivfp Ivfps Ivfpw Aw A.
std::array<double, 18> oracle_rhs(const std::array<double, 18>& x, const ModelParameters& p,
                                  double r) {
  const double Sh = x[0], Ih = x[1], Jh = x[2], Rh = x[3];
  const double Mw = x[4], M = x[5];
  const double Svfw = x[6], Svf = x[7], Svfpw = x[8], Svfp = x[9], Svfps = x[10];
  const double Ivfw = x[11], Ivf = x[12], Ivfp = x[13], Ivfps = x[14], Ivfpw = x[15];
  const double Aw = x[16], A = x[17];
  const double Nh = Sh + Ih + Jh + Rh;
  const double Iv = Ivf + Ivfp;
  const double Ivw = Ivfw + Ivfpw + Ivfps;
  const double m = (M + Mw) > 0 ? M / (M + Mw) : 1.0;
  const double mw = 1.0 - m;
  const double eta = p.phi * (1.0 - (A + Aw) / p.K_a);
  const double etaw = p.phi_w * (1.0 - (A + Aw) / p.K_a);
  const double force = p.B * p.C_vh * Iv / Nh + p.B * p.C_vh_w * Ivw / Nh;
  const double lam = p.B * p.C_hv * Ih / Nh;
  std::array<double, 18> d{};
  d[0] = p.b_h * Nh - (force + p.mu_h) * Sh;
  d[1] = (1 - p.alpha) * force * Sh - (p.mu_h + p.gamma) * Ih;
  d[2] = p.alpha * force * Sh - (p.mu_h + p.theta) * Jh;
  d[3] = p.gamma * Ih + p.theta * Jh - p.mu_h * Rh;
  d[4] = p.psi * p.b_m * Aw - p.mu_m_w * Mw;
  d[5] = p.psi * p.b_m * A - p.mu_m * M;
  d[16] = r + etaw * p.v_w * (Svfpw + Ivfpw) - (p.psi + p.mu_a) * Aw;
  d[17] = eta * (Svfp + Ivfp) + etaw * p.v * (Svfpw + Ivfpw) - (p.psi + p.mu_a) * A;
  d[6] = p.psi * p.b_f * Aw - (lam + p.sigma + p.mu_f_w) * Svfw;
  d[7] = p.psi * p.b_f * A - (lam + p.sigma + p.mu_f) * Svf;
  d[11] = lam * Svfw - (p.sigma + p.mu_f_w) * Ivfw;
  d[12] = lam * Svf - (p.sigma + p.mu_f) * Ivf;
  d[8] = p.sigma * Svfw - (lam + p.mu_f_w) * Svfpw;
  d[9] = p.sigma * m * Svf - (lam + p.mu_f) * Svfp;
  d[10] = p.sigma * mw * Svf - (lam + p.mu_f) * Svfps;
  d[15] = p.sigma * Ivfw + lam * Svfpw - p.mu_f_w * Ivfpw;
  d[13] = p.sigma * m * Ivf + lam * Svfp - p.mu_f * Ivfp;
  d[14] = p.sigma * mw * Ivf + lam * Svfps - p.mu_f_w * Ivfps;
  return d;
}

}  // namespace

TEST_CASE("aggregates: male ratio") {
  const auto p = fixtures::default_params();
  StateVector s = baseline_initial_state();
  s[M_v] = 10;
  s[M_v_w] = 0;
  auto a = derived_aggregates(s, p);
  CHECK(a.m == 1.0);
  CHECK(a.m_w == 0.0);
  s[M_v] = 3;
  s[M_v_w] = 1;
  a = derived_aggregates(s, p);
  CHECK(a.m == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(a.m_w == doctest::Approx(0.25).epsilon(1e-15));
  s[M_v] = 0;
  s[M_v_w] = 0;
  a = derived_aggregates(s, p);
  CHECK(a.m == 1.0);
  CHECK(a.m_w == 0.0);
}

TEST_CASE("aggregates: oviposition vanishes at capacity") {
  auto p = fixtures::default_params();
  StateVector s = baseline_initial_state();
  s[A] = p.K_a;
  s[A_w] = 0;
  const auto a = derived_aggregates(s, p);
  CHECK(a.eta == 0.0);
  CHECK(a.eta_w == 0.0);
}

TEST_CASE("aggregates: eta is phi/2 at twice the aquatic population") {
  const auto p = fixtures::params_with_factor(2.0);
  const auto a = derived_aggregates(baseline_initial_state(), p);
  CHECK(a.eta == doctest::Approx(6.5).epsilon(1e-14));
  CHECK(a.eta_w == doctest::Approx(5.5).epsilon(1e-14));
}

TEST_CASE("aggregates: extinct humans") {
  StateVector s;
  CHECK_THROWS_AS(derived_aggregates(s, fixtures::default_params()), DomainError);
}

TEST_CASE("rhs: no vectors") {
  const auto p = fixtures::default_params();
  StateVector s;
  s[S_h] = 1000.0;
  const auto d = rhs(0.0, s, p, 0.0);
  CHECK(d[S_h] == doctest::Approx((p.b_h - p.mu_h) * 1000.0).epsilon(1e-14));
  CHECK(d[I_h] == 0.0);
  CHECK(d[J_h] == 0.0);
  CHECK(d[R_h] == 0.0);
  for (std::size_t i = 4; i < kStateSize; ++i) CHECK(d.values[i] == 0.0);
}

TEST_CASE("rhs: disease-free subspace is invariant") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(11);
  StateVector s = fixtures::random_interior_state(p, rng);
  s[I_h] = 0;
  s[J_h] = 0;
  for (auto c : {I_vf_w, I_vf, I_vfp, I_vfp_s, I_vfp_w}) s[c] = 0;
  const auto d = rhs(0.0, s, p, 1000.0);
  CHECK(d[I_h] == 0.0);
  CHECK(d[J_h] == 0.0);
  CHECK(d[I_vf] == 0.0);
  CHECK(d[I_vf_w] == 0.0);
  CHECK(d[I_vfp] == 0.0);
  CHECK(d[I_vfp_s] == 0.0);
  CHECK(d[I_vfp_w] == 0.0);
}

TEST_CASE("rhs: matches an independent transcription") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(5);
  std::vector<StateVector> states = {baseline_initial_state()};
  for (int i = 0; i < 20; ++i) states.push_back(fixtures::random_interior_state(p, rng));
  for (const auto& s : states) {
    for (double r : {0.0, 2.5e6}) {
      const auto d = rhs(0.0, s, p, r);
      const auto o = oracle_rhs(s.values, p, r);
      for (std::size_t i = 0; i < kStateSize; ++i) {
        const double scale = std::max({std::abs(o[i]), 1e-6 * s.one_norm() * 1e-6, 1.0});
        CHECK(std::abs(d.values[i] - o[i]) / scale < 1e-12);
      }
    }
  }
}

TEST_CASE("rhs: human total closes") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto s = fixtures::random_interior_state(p, rng);
    const auto d = rhs(0.0, s, p, 0.0);
    const double sum = d[S_h] + d[I_h] + d[J_h] + d[R_h];
    CHECK(sum == doctest::Approx((p.b_h - p.mu_h) * s.human_total()).epsilon(1e-9));
  }
}

TEST_CASE("rhs: non-negative on the boundary") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = fixtures::random_interior_state(p, rng);
    for (std::size_t i = 0; i < kStateSize; ++i) {
      StateVector s = base;
      s.values[i] = 0.0;
      const auto d = rhs(0.0, s, p, 0.0);
      CHECK_MESSAGE(d.values[i] >= 0.0, kCompartmentNames[i]);
    }
  }
}

TEST_CASE("rhs: aquatic stage dissipates at capacity") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    StateVector s = fixtures::random_interior_state(p, rng);
    const double total = s[A] + s[A_w];
    s[A] *= p.K_a / total;
    s[A_w] *= p.K_a / total;
    const auto d = rhs(0.0, s, p, p.max_invariant_release());
    CHECK(d[A] + d[A_w] <= 1e-9 * p.K_a);
  }
}

TEST_CASE("rhs: non-finite input names the compartment") {
  const auto p = fixtures::default_params();
  StateVector s = baseline_initial_state();
  s[A] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(rhs(0.0, s, p, 0.0), ComputationError);
}

TEST_CASE("jacobian: agrees with central differences") {
  const auto p = fixtures::default_params();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = fixtures::random_interior_state(p, rng);
    const Jacobian J = jacobian(s, p);
    for (std::size_t j = 0; j < kStateSize; ++j) {
      const double h = 1e-6 * std::max(std::abs(s.values[j]), 1.0);
      StateVector up = s, dn = s;
      up.values[j] += h;
      dn.values[j] -= h;
      const auto fu = rhs(0.0, up, p, 0.0);
      const auto fd = rhs(0.0, dn, p, 0.0);
      for (std::size_t i = 0; i < kStateSize; ++i) {
        const double fdv = (fu.values[i] - fd.values[i]) / (2.0 * h);
        if (std::abs(J[i][j]) > 1e-8) {
          worst = std::max(worst, std::abs(J[i][j] - fdv) / std::abs(J[i][j]));
        }
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("jacobian: closed-form entries") {
  const auto p = fixtures::default_params();
  StateVector s = baseline_initial_state();
  s[I_h] = 0;
  for (auto c : {I_vf_w, I_vf, I_vfp, I_vfp_s, I_vfp_w}) s[c] = 0;
  const Jacobian J = jacobian(s, p);
  const double Nh = s.human_total();
  CHECK(J[index(I_h)][index(I_vf)] ==
        doctest::Approx((1 - p.alpha) * p.B * p.C_vh * s[S_h] / Nh).epsilon(1e-14));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    const auto r = fixtures::random_interior_state(p, rng);
    CHECK(jacobian(r, p)[index(M_v_w)][index(A_w)] == p.psi * p.b_m);
  }
}

TEST_CASE("jacobian: singular aggregates") {
  const auto p = fixtures::default_params();
  StateVector s = baseline_initial_state();
  s[M_v] = 0;
  s[M_v_w] = 0;
  CHECK_THROWS_AS(jacobian(s, p), DomainError);
  CHECK_THROWS_AS(jacobian(StateVector{}, p), DomainError);
}

TEST_CASE("in_domain: examples") {
  const auto p = fixtures::default_params();
  CHECK(in_domain(StateVector{}, p, 1e-6).all_pass());

  StateVector s;
  s[S_h] = 1;
  s[A] = 1.001 * p.K_a;
  const auto r = in_domain(s, p, 1e-6);
  const auto* aq = r.find("aquatic");
  REQUIRE(aq != nullptr);
  CHECK_FALSE(aq->pass);
  CHECK(aq->slack == doctest::Approx(-0.001 * p.K_a).epsilon(1e-9));

  s[A] = -1.0;
  CHECK_FALSE(in_domain(s, p, 1e-6).find("nonnegative")->pass);
}

TEST_CASE("in_domain: baseline initial state against the carrying capacity") {
  // At twice the initial aquatic population, the non-pregnant female bound
  // b_f psi / (sigma + mu_f) K_a = 2.70e6 is below the 9e6 such females.
  const auto tight = in_domain(baseline_initial_state(), fixtures::params_with_factor(2.0), 1e-9);
  CHECK_FALSE(tight.find("nonpregnant_females")->pass);
  CHECK(tight.find("aquatic")->pass);
  CHECK(tight.find("males")->pass);
  CHECK(tight.find("pregnant_females")->pass);
  CHECK(in_domain(baseline_initial_state(), fixtures::default_params(), 1e-9).all_pass());
}

TEST_CASE("scale_state") {
  const StateVector s = baseline_initial_state();
  CHECK(scale_state(s, 1.0) == s);
  const StateVector q = scale_state(s, 2'960'000.0 / 50'000'000.0);
  CHECK(q[S_h] == doctest::Approx(2'960'000.0).epsilon(1e-15));
  CHECK(scale_state(s, 0.0592)[A] == doctest::Approx(1'480'000.0).epsilon(1e-15));
  CHECK_THROWS(scale_state(s, 0.0));
}

TEST_CASE("clamp_roundoff") {
  StateVector s = baseline_initial_state();
  s[I_vf_w] = -1e-3;
  CHECK(clamp_roundoff(s) == kStateSize);
  CHECK(s[I_vf_w] == 0.0);
  s[I_vf_w] = -1e3;
  CHECK(clamp_roundoff(s) == index(I_vf_w));
}

TEST_CASE("parameter validation") {
  auto p = fixtures::default_params();
  CHECK_NOTHROW(validate(p));
  auto q = p;
  q.mu_f_w = q.mu_f / 2;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.K_a = 0;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.alpha = 1.5;
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = p;
  q.B = -1;
  CHECK_THROWS_AS(validate(q), ValidationError);
}
