#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace wolbachia {

/// Compartment order of the 18-dimensional state. This order is also the
/// column order of every CSV the tools emit and the row/column order of the
/// Jacobian.
enum class Compartment : std::size_t {
  S_h,
  I_h,
  J_h,
  R_h,
  M_v_w,
  M_v,
  S_vf_w,
  S_vf,
  S_vfp_w,
  S_vfp,
  S_vfp_s,
  I_vf_w,
  I_vf,
  I_vfp,
  I_vfp_s,
  I_vfp_w,
  A_w,
  A,
};

inline constexpr std::size_t kStateSize = 18;

inline constexpr std::array<std::string_view, kStateSize> kCompartmentNames = {
    "S_h",     "I_h",   "J_h",     "R_h",     "M_v_w", "M_v",
    "S_vf_w",  "S_vf",  "S_vfp_w", "S_vfp",   "S_vfp_s", "I_vf_w",
    "I_vf",    "I_vfp", "I_vfp_s", "I_vfp_w", "A_w",   "A"};

constexpr std::size_t index(Compartment c) noexcept {
  return static_cast<std::size_t>(c);
}

constexpr std::string_view name(Compartment c) noexcept {
  return kCompartmentNames[index(c)];
}

/// Population counts of every compartment at one instant.
struct StateVector {
  std::array<double, kStateSize> values{};

  constexpr double& operator[](Compartment c) noexcept {
    return values[index(c)];
  }
  constexpr double operator[](Compartment c) const noexcept {
    return values[index(c)];
  }

  double human_total() const noexcept {
    using enum Compartment;
    return (*this)[S_h] + (*this)[I_h] + (*this)[J_h] + (*this)[R_h];
  }

  double one_norm() const noexcept;

  bool operator==(const StateVector&) const = default;
};

/// Time derivative of a StateVector; same layout.
struct StateDerivative {
  std::array<double, kStateSize> values{};

  constexpr double& operator[](Compartment c) noexcept {
    return values[index(c)];
  }
  constexpr double operator[](Compartment c) const noexcept {
    return values[index(c)];
  }
};

/// Rate constants of the coupled dengue/Wolbachia model. Rates are per day.
struct ModelParameters {
  double b_h = 0.0;       // human birth rate
  double mu_h = 0.0;      // human death rate
  double alpha = 0.0;     // healthcare-seeking fraction
  double gamma = 0.0;     // recovery, non-healthcare-seeking
  double theta = 0.0;     // recovery, healthcare-seeking
  double B = 0.0;         // biting rate
  double C_hv = 0.0;      // human -> mosquito transmission probability
  double C_vh = 0.0;      // mosquito -> human, uninfected vector
  double C_vh_w = 0.0;    // mosquito -> human, Wolbachia vector
  double sigma = 0.0;     // mating rate
  double phi = 0.0;       // egg laying, uninfected
  double phi_w = 0.0;     // egg laying, Wolbachia
  double v_w = 0.0;       // maternal transmission fraction
  double v = 0.0;         // maternal leakage fraction
  double psi = 0.0;       // aquatic development rate
  double b_m = 0.0;       // male fraction at emergence
  double b_f = 0.0;       // female fraction at emergence
  double mu_a = 0.0;      // aquatic death rate
  double mu_f = 0.0;      // female death rate, uninfected
  double mu_f_w = 0.0;    // female death rate, Wolbachia
  double mu_m = 0.0;      // male death rate, uninfected
  double mu_m_w = 0.0;    // male death rate, Wolbachia
  double K_a = 0.0;       // aquatic carrying capacity (mosquitoes)

  bool operator==(const ModelParameters&) const = default;

  /// Largest release rate for which the aquatic bound stays forward invariant.
  double max_invariant_release() const noexcept { return (psi + mu_a) * K_a; }
};

/// Named parameter access used by the scenario loader and provenance tests.
struct ParameterField {
  std::string_view name;
  double ModelParameters::*member;
};

inline constexpr std::array<ParameterField, 23> kParameterFields = {{
    {"b_h", &ModelParameters::b_h},       {"mu_h", &ModelParameters::mu_h},
    {"alpha", &ModelParameters::alpha},   {"gamma", &ModelParameters::gamma},
    {"theta", &ModelParameters::theta},   {"B", &ModelParameters::B},
    {"C_hv", &ModelParameters::C_hv},     {"C_vh", &ModelParameters::C_vh},
    {"C_vh_w", &ModelParameters::C_vh_w}, {"sigma", &ModelParameters::sigma},
    {"phi", &ModelParameters::phi},       {"phi_w", &ModelParameters::phi_w},
    {"v_w", &ModelParameters::v_w},       {"v", &ModelParameters::v},
    {"psi", &ModelParameters::psi},       {"b_m", &ModelParameters::b_m},
    {"b_f", &ModelParameters::b_f},       {"mu_a", &ModelParameters::mu_a},
    {"mu_f", &ModelParameters::mu_f},     {"mu_f_w", &ModelParameters::mu_f_w},
    {"mu_m", &ModelParameters::mu_m},     {"mu_m_w", &ModelParameters::mu_m_w},
    {"K_a", &ModelParameters::K_a},
}};

}  // namespace wolbachia
