#include "wolbachia/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wolbachia/errors.hpp"

namespace wolbachia {

using enum Compartment;

double StateVector::one_norm() const noexcept {
  double total = 0.0;
  for (double v : values) total += std::abs(v);
  return total;
}

DerivedAggregates derived_aggregates(const StateVector& x,
                                     const ModelParameters& p) {
  DerivedAggregates agg;
  agg.N_h = x.human_total();
  if (!(agg.N_h > 0.0)) {
    throw DomainError("human population is extinct (N_h <= 0)");
  }
  agg.I_v = x[I_vf] + x[I_vfp];
  agg.I_v_w = x[I_vf_w] + x[I_vfp_w] + x[I_vfp_s];
  const double males = x[M_v] + x[M_v_w];
  if (males > 0.0) {
    agg.m = x[M_v] / males;
    agg.m_w = 1.0 - agg.m;
  }
  const double crowding = 1.0 - (x[A] + x[A_w]) / p.K_a;
  agg.eta = p.phi * crowding;
  agg.eta_w = p.phi_w * crowding;
  return agg;
}

StateDerivative rhs(double t, const StateVector& x, const ModelParameters& p,
                    double release) {
  const DerivedAggregates g = derived_aggregates(x, p);

  // Force of infection on humans and on mosquitoes.
  const double lambda_h =
      p.B * p.C_vh * g.I_v / g.N_h + p.B * p.C_vh_w * g.I_v_w / g.N_h;
  const double lambda_v = p.B * p.C_hv * x[I_h] / g.N_h;

  const double pregnant_w = x[S_vfp_w] + x[I_vfp_w];
  const double pregnant = x[S_vfp] + x[I_vfp];

  StateDerivative d;
  d[S_h] = p.b_h * g.N_h - (lambda_h + p.mu_h) * x[S_h];
  d[I_h] = (1.0 - p.alpha) * lambda_h * x[S_h] - (p.mu_h + p.gamma) * x[I_h];
  d[J_h] = p.alpha * lambda_h * x[S_h] - (p.mu_h + p.theta) * x[J_h];
  d[R_h] = p.gamma * x[I_h] + p.theta * x[J_h] - p.mu_h * x[R_h];

  d[M_v_w] = p.psi * p.b_m * x[A_w] - p.mu_m_w * x[M_v_w];
  d[M_v] = p.psi * p.b_m * x[A] - p.mu_m * x[M_v];
  d[A_w] = release + g.eta_w * p.v_w * pregnant_w - (p.psi + p.mu_a) * x[A_w];
  d[A] = g.eta * pregnant + g.eta_w * p.v * pregnant_w -
         (p.psi + p.mu_a) * x[A];

  d[S_vf_w] = p.psi * p.b_f * x[A_w] - (lambda_v + p.sigma + p.mu_f_w) * x[S_vf_w];
  d[S_vf] = p.psi * p.b_f * x[A] - (lambda_v + p.sigma + p.mu_f) * x[S_vf];
  d[I_vf_w] = lambda_v * x[S_vf_w] - (p.sigma + p.mu_f_w) * x[I_vf_w];
  d[I_vf] = lambda_v * x[S_vf] - (p.sigma + p.mu_f) * x[I_vf];
  d[S_vfp_w] = p.sigma * x[S_vf_w] - (lambda_v + p.mu_f_w) * x[S_vfp_w];
  d[S_vfp] = p.sigma * g.m * x[S_vf] - (lambda_v + p.mu_f) * x[S_vfp];
  d[S_vfp_s] = p.sigma * g.m_w * x[S_vf] - (lambda_v + p.mu_f) * x[S_vfp_s];
  d[I_vfp_w] = p.sigma * x[I_vf_w] + lambda_v * x[S_vfp_w] - p.mu_f_w * x[I_vfp_w];
  d[I_vfp] = p.sigma * g.m * x[I_vf] + lambda_v * x[S_vfp] - p.mu_f * x[I_vfp];
  // Sterile infected females die at the Wolbachia rate as written in the
  // model equations.
  d[I_vfp_s] =
      p.sigma * g.m_w * x[I_vf] + lambda_v * x[S_vfp_s] - p.mu_f_w * x[I_vfp_s];

  for (std::size_t i = 0; i < kStateSize; ++i) {
    if (!std::isfinite(d.values[i])) {
      throw ComputationError(
          fmt::format("non-finite derivative for {} at t = {}",
                      kCompartmentNames[i], t),
          std::string(kCompartmentNames[i]));
    }
  }
  return d;
}

Jacobian jacobian(const StateVector& x, const ModelParameters& p) {
  const DerivedAggregates g = derived_aggregates(x, p);
  const double males = x[M_v] + x[M_v_w];
  if (!(males > 0.0)) {
    throw DomainError("Jacobian undefined without adult males");
  }

  Jacobian jac{};
  auto at = [&jac](Compartment row, Compartment col) -> double& {
    return jac[index(row)][index(col)];
  };

  const double N = g.N_h;
  const double N2 = N * N;
  const double beta = p.B * p.C_vh;
  const double beta_w = p.B * p.C_vh_w;
  const double lambda_h = (beta * g.I_v + beta_w * g.I_v_w) / N;
  const double lambda_v = p.B * p.C_hv * x[I_h] / N;

  // Human block. Every human compartment enters lambda_h through N, so
  // d(lambda_h)/d(human) = -lambda_h / N.
  const double dilution = x[S_h] * lambda_h / N;
  for (Compartment c : {S_h, I_h, J_h, R_h}) {
    at(S_h, c) = p.b_h + dilution;
    at(I_h, c) = -(1.0 - p.alpha) * dilution;
    at(J_h, c) = -p.alpha * dilution;
  }
  at(S_h, S_h) -= lambda_h + p.mu_h;
  at(I_h, S_h) += (1.0 - p.alpha) * lambda_h;
  at(J_h, S_h) += p.alpha * lambda_h;
  at(I_h, I_h) -= p.mu_h + p.gamma;
  at(J_h, J_h) -= p.mu_h + p.theta;
  at(R_h, I_h) = p.gamma;
  at(R_h, J_h) = p.theta;
  at(R_h, R_h) = -p.mu_h;

  for (Compartment c : {I_vf, I_vfp}) {
    at(S_h, c) = -beta * x[S_h] / N;
    at(I_h, c) = (1.0 - p.alpha) * beta * x[S_h] / N;
    at(J_h, c) = p.alpha * beta * x[S_h] / N;
  }
  for (Compartment c : {I_vf_w, I_vfp_w, I_vfp_s}) {
    at(S_h, c) = -beta_w * x[S_h] / N;
    at(I_h, c) = (1.0 - p.alpha) * beta_w * x[S_h] / N;
    at(J_h, c) = p.alpha * beta_w * x[S_h] / N;
  }

  // Mosquito rows that carry lambda_v. d(lambda_v)/dI_h = B C_hv (N - I_h)/N^2
  // and d(lambda_v)/d(other human) = -B C_hv I_h / N^2.
  const double dlv_dIh = p.B * p.C_hv * (N - x[I_h]) / N2;
  const double dlv_dother = -p.B * p.C_hv * x[I_h] / N2;
  auto add_lambda_v_terms = [&](Compartment row, double coeff) {
    // row gains coeff * lambda_v
    at(row, S_h) += coeff * dlv_dother;
    at(row, I_h) += coeff * dlv_dIh;
    at(row, J_h) += coeff * dlv_dother;
    at(row, R_h) += coeff * dlv_dother;
  };
  add_lambda_v_terms(S_vf_w, -x[S_vf_w]);
  add_lambda_v_terms(S_vf, -x[S_vf]);
  add_lambda_v_terms(I_vf_w, x[S_vf_w]);
  add_lambda_v_terms(I_vf, x[S_vf]);
  add_lambda_v_terms(S_vfp_w, -x[S_vfp_w]);
  add_lambda_v_terms(S_vfp, -x[S_vfp]);
  add_lambda_v_terms(S_vfp_s, -x[S_vfp_s]);
  add_lambda_v_terms(I_vfp_w, x[S_vfp_w]);
  add_lambda_v_terms(I_vfp, x[S_vfp]);
  add_lambda_v_terms(I_vfp_s, x[S_vfp_s]);

  // Males.
  at(M_v_w, A_w) = p.psi * p.b_m;
  at(M_v_w, M_v_w) = -p.mu_m_w;
  at(M_v, A) = p.psi * p.b_m;
  at(M_v, M_v) = -p.mu_m;

  // Non-pregnant females.
  at(S_vf_w, A_w) = p.psi * p.b_f;
  at(S_vf_w, S_vf_w) = -(lambda_v + p.sigma + p.mu_f_w);
  at(S_vf, A) = p.psi * p.b_f;
  at(S_vf, S_vf) = -(lambda_v + p.sigma + p.mu_f);
  at(I_vf_w, S_vf_w) = lambda_v;
  at(I_vf_w, I_vf_w) = -(p.sigma + p.mu_f_w);
  at(I_vf, S_vf) = lambda_v;
  at(I_vf, I_vf) = -(p.sigma + p.mu_f);

  // Pregnant females. dm/dM_v = M_v_w / males^2, dm/dM_v_w = -M_v / males^2,
  // and m_w = 1 - m.
  const double dm_dMv = x[M_v_w] / (males * males);
  const double dm_dMvw = -x[M_v] / (males * males);

  at(S_vfp_w, S_vf_w) = p.sigma;
  at(S_vfp_w, S_vfp_w) = -(lambda_v + p.mu_f_w);

  at(S_vfp, S_vf) = p.sigma * g.m;
  at(S_vfp, M_v) = p.sigma * dm_dMv * x[S_vf];
  at(S_vfp, M_v_w) = p.sigma * dm_dMvw * x[S_vf];
  at(S_vfp, S_vfp) = -(lambda_v + p.mu_f);

  at(S_vfp_s, S_vf) = p.sigma * g.m_w;
  at(S_vfp_s, M_v) = -p.sigma * dm_dMv * x[S_vf];
  at(S_vfp_s, M_v_w) = -p.sigma * dm_dMvw * x[S_vf];
  at(S_vfp_s, S_vfp_s) = -(lambda_v + p.mu_f);

  at(I_vfp_w, I_vf_w) = p.sigma;
  at(I_vfp_w, S_vfp_w) = lambda_v;
  at(I_vfp_w, I_vfp_w) = -p.mu_f_w;

  at(I_vfp, I_vf) = p.sigma * g.m;
  at(I_vfp, M_v) = p.sigma * dm_dMv * x[I_vf];
  at(I_vfp, M_v_w) = p.sigma * dm_dMvw * x[I_vf];
  at(I_vfp, S_vfp) = lambda_v;
  at(I_vfp, I_vfp) = -p.mu_f;

  at(I_vfp_s, I_vf) = p.sigma * g.m_w;
  at(I_vfp_s, M_v) = -p.sigma * dm_dMv * x[I_vf];
  at(I_vfp_s, M_v_w) = -p.sigma * dm_dMvw * x[I_vf];
  at(I_vfp_s, S_vfp_s) = lambda_v;
  at(I_vfp_s, I_vfp_s) = -p.mu_f_w;

  // Aquatic stage. d(eta)/dA = d(eta)/dA_w = -phi / K_a.
  const double pregnant_w = x[S_vfp_w] + x[I_vfp_w];
  const double pregnant = x[S_vfp] + x[I_vfp];
  const double deta = -p.phi / p.K_a;
  const double deta_w = -p.phi_w / p.K_a;

  at(A_w, S_vfp_w) = g.eta_w * p.v_w;
  at(A_w, I_vfp_w) = g.eta_w * p.v_w;
  at(A_w, A_w) = deta_w * p.v_w * pregnant_w - (p.psi + p.mu_a);
  at(A_w, A) = deta_w * p.v_w * pregnant_w;

  at(A, S_vfp) = g.eta;
  at(A, I_vfp) = g.eta;
  at(A, S_vfp_w) = g.eta_w * p.v;
  at(A, I_vfp_w) = g.eta_w * p.v;
  const double dA_dcrowd = deta * pregnant + deta_w * p.v * pregnant_w;
  at(A, A_w) = dA_dcrowd;
  at(A, A) = dA_dcrowd - (p.psi + p.mu_a);

  return jac;
}

bool DomainReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.pass; });
}

const BoundCheck* DomainReport::find(std::string_view name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

DomainReport in_domain(const StateVector& x, const ModelParameters& p,
                       double tol) {
  DomainReport report;

  double most_negative = 0.0;
  for (double v : x.values) most_negative = std::min(most_negative, v);
  const double floor = -tol * x.one_norm();
  report.checks.push_back({"nonnegative", most_negative, 0.0, most_negative,
                           !(most_negative < floor)});

  auto upper = [&](std::string name, double value, double bound) {
    const bool ok = value <= bound * (1.0 + tol);
    report.checks.push_back({std::move(name), value, bound, bound - value, ok});
  };

  upper("aquatic", x[A] + x[A_w], p.K_a);
  upper("males", x[M_v] + x[M_v_w], p.b_m * p.psi / p.mu_m * p.K_a);
  upper("nonpregnant_females", x[S_vf] + x[S_vf_w] + x[I_vf] + x[I_vf_w],
        p.b_f * p.psi / (p.sigma + p.mu_f) * p.K_a);
  upper("pregnant_females",
        x[S_vfp] + x[S_vfp_w] + x[S_vfp_s] + x[I_vfp] + x[I_vfp_w] + x[I_vfp_s],
        p.b_f * p.sigma / (p.sigma + p.mu_f) * p.psi / p.mu_f * p.K_a);
  return report;
}

StateVector scale_state(const StateVector& state, double factor) {
  if (!(factor > 0.0)) {
    throw DomainError("scale factor must be positive");
  }
  StateVector out = state;
  for (double& v : out.values) v *= factor;
  return out;
}

std::size_t clamp_roundoff(StateVector& state, double rel) {
  const double threshold = rel * state.one_norm();
  std::size_t worst = kStateSize;
  double worst_value = 0.0;
  for (std::size_t i = 0; i < kStateSize; ++i) {
    double& v = state.values[i];
    if (v >= 0.0) continue;
    if (-v < threshold) {
      v = 0.0;
    } else if (v < worst_value) {
      worst_value = v;
      worst = i;
    }
  }
  return worst;
}

void validate(const ModelParameters& p) {
  for (const auto& field : kParameterFields) {
    const double v = p.*field.member;
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(fmt::format(
          "parameter {} must be finite and non-negative (got {})", field.name, v));
    }
  }
  for (auto [name, v] : {std::pair{"alpha", p.alpha}, {"C_hv", p.C_hv},
                         {"C_vh", p.C_vh}, {"C_vh_w", p.C_vh_w}, {"v_w", p.v_w},
                         {"v", p.v}, {"b_m", p.b_m}, {"b_f", p.b_f}}) {
    if (v > 1.0) {
      throw ValidationError(
          fmt::format("parameter {} is a fraction and must be <= 1 (got {})", name, v));
    }
  }
  if (std::abs(p.v_w + p.v - 1.0) > 1e-12) {
    throw ValidationError("v_w + v must equal 1");
  }
  if (std::abs(p.b_m + p.b_f - 1.0) > 1e-12) {
    throw ValidationError("b_m + b_f must equal 1");
  }
  if (p.mu_f > p.mu_f_w) {
    throw ValidationError("mu_f must not exceed mu_f_w");
  }
  if (p.mu_m > p.mu_m_w) {
    throw ValidationError("mu_m must not exceed mu_m_w");
  }
  if (!(p.K_a > 0.0)) {
    throw ValidationError("K_a must be positive");
  }
}

}  // namespace wolbachia
