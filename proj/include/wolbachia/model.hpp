#pragma once

#include <array>
#include <string>
#include <vector>

#include "wolbachia/state.hpp"

namespace wolbachia {

/// Quantities that appear repeatedly in the right-hand side.
struct DerivedAggregates {
  double N_h = 0.0;    // total humans
  double I_v = 0.0;    // dengue-infected vectors without Wolbachia
  double I_v_w = 0.0;  // dengue-infected vectors with Wolbachia (incl. sterile)
  double m = 1.0;      // probability a male is uninfected
  double m_w = 0.0;    // probability a male carries Wolbachia
  double eta = 0.0;    // oviposition rate, uninfected
  double eta_w = 0.0;  // oviposition rate, Wolbachia
};

/// Throws DomainError when the human population is extinct. With no males at
/// all, m = 1 and m_w = 0.
DerivedAggregates derived_aggregates(const StateVector& state,
                                     const ModelParameters& params);

/// Right-hand side of the coupled system. `release` (mosquitoes/day) enters
/// only the Wolbachia aquatic compartment. The time argument is unused by the
/// model itself; it is carried for error reporting.
StateDerivative rhs(double t, const StateVector& state,
                    const ModelParameters& params, double release);

using Jacobian = std::array<std::array<double, kStateSize>, kStateSize>;

/// Analytic Jacobian d(rhs)/d(state), row = equation, column = compartment.
/// Requires N_h > 0 and at least one adult male.
Jacobian jacobian(const StateVector& state, const ModelParameters& params);

struct BoundCheck {
  std::string name;
  double value = 0.0;  // aggregate being bounded
  double bound = 0.0;  // upper bound (or 0 for the non-negativity check)
  double slack = 0.0;  // bound - value (value - 0 for non-negativity)
  bool pass = true;
};

/// Per-bound membership report for the forward-invariant domain.
struct DomainReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const noexcept;
  const BoundCheck* find(std::string_view name) const noexcept;
};

/// Checks non-negativity and the four vector-population upper bounds. `tol` is
/// relative: an upper bound passes when value <= bound * (1 + tol); a field
/// passes non-negativity when >= -tol * (one-norm of the state).
DomainReport in_domain(const StateVector& state, const ModelParameters& params,
                       double tol);

/// Multiplies every compartment by `factor` (> 0).
StateVector scale_state(const StateVector& state, double factor);

/// Sets negatives with |value| < rel * one_norm to zero. Returns the index of
/// the most negative remaining compartment, or kStateSize if none remains.
std::size_t clamp_roundoff(StateVector& state, double rel = 1e-9);

/// Throws ValidationError naming the first violated parameter invariant.
void validate(const ModelParameters& params);

}  // namespace wolbachia
