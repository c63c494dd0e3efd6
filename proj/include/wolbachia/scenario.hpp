#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wolbachia/cost.hpp"
#include "wolbachia/integrator.hpp"
#include "wolbachia/model.hpp"
#include "wolbachia/optimize.hpp"
#include "wolbachia/state.hpp"

namespace wolbachia {

/// K_a = factor * (A + A_w)(0) when no carrying capacity is given.
inline constexpr double kDefaultCarryingCapacityFactor = 13.0;
/// Quezon City population over the baseline population.
inline constexpr double kQuezonCityScale = 2'960'000.0 / 50'000'000.0;

struct Scenario {
  std::string preset;  // empty for fully custom documents
  ModelParameters params;  // K_a already resolved
  StateVector base_initial;  // before scaling
  double scale = 1.0;
  bool explicit_carrying_capacity = false;
  double carrying_capacity_factor = kDefaultCarryingCapacityFactor;
  int horizon = 365;
  int pieces = 12;
  CostConfig cost;
  CapacityFunction capacity;
  double budget = std::numeric_limits<double>::infinity();
  IntegratorConfig integrator;
  ReleaseAccounting accounting = ReleaseAccounting::PerDay;
  SolverSettings solver;
  bool strict_domain = false;

  /// base_initial multiplied by scale.
  StateVector initial() const;

  bool operator==(const Scenario&) const = default;
};

/// Rates of the baseline parameter set, K_a left at zero.
ModelParameters baseline_parameters();
/// Unscaled baseline initial populations.
StateVector baseline_initial_state();
double default_carrying_capacity(const StateVector& initial, double factor);

std::vector<std::string> preset_names();
/// Throws ValidationError for unknown names.
Scenario preset(std::string_view name);

/// Builds a scenario from a parsed document. Throws ValidationError naming the
/// offending field.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(std::string_view text);
/// Reads `source` as a file when it exists, otherwise as a preset name.
Scenario load_scenario(const std::string& source);

nlohmann::json to_json(const Scenario& s);
std::string dump_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Checks parameter invariants, horizon/pieces, the initial state against the
/// domain and, in strict mode, capacity <= (psi + mu_a) K_a.
void validate(const Scenario& s);

/// Single-objective problem with the scenario's settings.
SingleObjectiveProblem make_problem(const Scenario& s);

}  // namespace wolbachia
