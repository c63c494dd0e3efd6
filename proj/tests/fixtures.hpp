#pragma once

#include <random>

#include "wolbachia/model.hpp"
#include "wolbachia/scenario.hpp"

namespace fixtures {

using namespace wolbachia;

inline ModelParameters params_with_factor(double factor) {
  ModelParameters p = baseline_parameters();
  p.K_a = default_carrying_capacity(baseline_initial_state(), factor);
  return p;
}

inline ModelParameters default_params() {
  return params_with_factor(kDefaultCarryingCapacityFactor);
}

// Random state strictly inside the domain bounds, with every compartment > 0.
inline StateVector random_interior_state(const ModelParameters& p, std::mt19937_64& rng) {
  using enum Compartment;
  std::uniform_real_distribution<double> u(0.05, 0.95);
  StateVector s;
  const double humans = 1e6 * (1.0 + 50.0 * u(rng));
  const double split[4] = {u(rng) + 2.0, u(rng), u(rng), u(rng)};
  const double sum = split[0] + split[1] + split[2] + split[3];
  s[S_h] = humans * split[0] / sum;
  s[I_h] = humans * split[1] / sum;
  s[J_h] = humans * split[2] / sum;
  s[R_h] = humans * split[3] / sum;

  const double aq = p.K_a * u(rng);
  const double wfrac = u(rng);
  s[A_w] = aq * wfrac;
  s[A] = aq * (1.0 - wfrac);

  const double males = p.b_m * p.psi / p.mu_m * p.K_a * u(rng);
  const double mw = u(rng);
  s[M_v_w] = males * mw;
  s[M_v] = males * (1.0 - mw);

  const double np = p.b_f * p.psi / (p.sigma + p.mu_f) * p.K_a * u(rng);
  double w[4] = {u(rng), u(rng), u(rng), u(rng)};
  double ws = w[0] + w[1] + w[2] + w[3];
  s[S_vf_w] = np * w[0] / ws;
  s[S_vf] = np * w[1] / ws;
  s[I_vf_w] = np * w[2] / ws;
  s[I_vf] = np * w[3] / ws;

  const double preg = p.b_f * p.sigma / (p.sigma + p.mu_f) * p.psi / p.mu_f * p.K_a * u(rng);
  double v[6] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  double vs = 0.0;
  for (double x : v) vs += x;
  s[S_vfp_w] = preg * v[0] / vs;
  s[S_vfp] = preg * v[1] / vs;
  s[S_vfp_s] = preg * v[2] / vs;
  s[I_vfp] = preg * v[3] / vs;
  s[I_vfp_s] = preg * v[4] / vs;
  s[I_vfp_w] = preg * v[5] / vs;
  return s;
}

}  // namespace fixtures
