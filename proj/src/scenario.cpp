#include "wolbachia/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "wolbachia/errors.hpp"
#include "wolbachia/io.hpp"
#include "wolbachia/numeric_format.hpp"

namespace wolbachia {

using nlohmann::json;

StateVector Scenario::initial() const { return scale_state(base_initial, scale); }

ModelParameters baseline_parameters() {
  ModelParameters p;
  p.b_h = 0.00085 / 7.0;
  p.mu_h = 0.00045 / 7.0;
  p.alpha = 0.2;
  p.gamma = 0.5 / 7.0;
  p.theta = 1.0 / 7.0;
  p.B = 1.0 / 7.0;
  p.C_hv = 0.75;
  p.C_vh = 0.375;
  p.C_vh_w = 0.0;
  p.sigma = 1.0;
  p.phi = 13.0;
  p.phi_w = 11.0;
  p.v_w = 0.95;
  p.v = 0.05;
  p.psi = 1.0 / 8.75;
  p.b_m = 0.5;
  p.b_f = 0.5;
  p.mu_a = 0.02;
  p.mu_f = 1.0 / 17.5;
  p.mu_f_w = 1.0 / 15.8;
  p.mu_m = 1.0 / 10.5;
  p.mu_m_w = 1.0 / 10.5;
  return p;
}

StateVector baseline_initial_state() {
  using enum Compartment;
  StateVector s;
  s[S_h] = 50e6;
  s[I_h] = 15000.0;
  s[J_h] = 1500.0;
  s[R_h] = 5000.0;
  s[M_v] = 10e6;
  s[S_vf] = 7.5e6;
  s[S_vfp] = 2.5e6;
  s[I_vf] = 1.5e6;
  s[I_vfp] = 5e5;
  s[A] = 25e6;
  return s;
}

double default_carrying_capacity(const StateVector& initial, double factor) {
  return factor * (initial[Compartment::A] + initial[Compartment::A_w]);
}

namespace {

void resolve_carrying_capacity(Scenario& s) {
  if (!s.explicit_carrying_capacity) {
    s.params.K_a = default_carrying_capacity(s.initial(), s.carrying_capacity_factor);
  }
}

double number_field(const json& v, std::string_view field) {
  try {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_number(v.get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", field, e.what()));
  }
  throw ValidationError(fmt::format("{}: expected a number or numeric string", field));
}

long long integer_field(const json& v, std::string_view field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec == std::errc() && ptr == text.data() + text.size()) return out;
  }
  throw ValidationError(fmt::format("{}: expected an integer", field));
}

std::uint64_t seed_field(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size()) return out;
  }
  throw ValidationError("solver.seed: expected a non-negative 64-bit integer");
}

bool bool_field(const json& v, std::string_view field) {
  if (!v.is_boolean()) throw ValidationError(fmt::format("{}: expected true or false", field));
  return v.get<bool>();
}

void require_object(const json& v, std::string_view field) {
  if (!v.is_object()) throw ValidationError(fmt::format("{}: expected an object", field));
}

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(fmt::format("{}: unknown field '{}'", where, key));
    }
  }
}

CapacityFunction parse_capacity(const json& c) {
  require_object(c, "capacity");
  if (!c.contains("kind")) throw ValidationError("capacity.kind: required");
  const std::string kind = c.at("kind").is_string() ? c.at("kind").get<std::string>() : "";
  if (kind == "constant") {
    reject_unknown(c, "capacity", {"kind", "value"});
    if (!c.contains("value")) throw ValidationError("capacity.value: required");
    return CapacityFunction::constant(number_field(c.at("value"), "capacity.value"));
  }
  if (kind == "ramp") {
    reject_unknown(c, "capacity", {"kind", "initial", "peak", "peak_day"});
    for (const char* f : {"initial", "peak", "peak_day"}) {
      if (!c.contains(f)) throw ValidationError(fmt::format("capacity.{}: required", f));
    }
    return CapacityFunction::ramp(number_field(c.at("initial"), "capacity.initial"),
                                  number_field(c.at("peak"), "capacity.peak"),
                                  number_field(c.at("peak_day"), "capacity.peak_day"));
  }
  if (kind == "table") {
    reject_unknown(c, "capacity", {"kind", "values"});
    if (!c.contains("values") || !c.at("values").is_array()) {
      throw ValidationError("capacity.values: expected an array");
    }
    std::vector<double> values;
    for (const auto& v : c.at("values")) values.push_back(number_field(v, "capacity.values"));
    return CapacityFunction::tabulated(std::move(values));
  }
  throw ValidationError("capacity.kind: expected constant, ramp or table");
}

json capacity_json(const CapacityFunction& c) {
  if (c.kind == CapacityFunction::Kind::Table) {
    json values = json::array();
    for (double v : c.table) values.push_back(format_number(v));
    return {{"kind", "table"}, {"values", values}};
  }
  if (c.initial == c.peak && c.peak_day == 1.0) {
    return {{"kind", "constant"}, {"value", format_number(c.initial)}};
  }
  return {{"kind", "ramp"},
          {"initial", format_number(c.initial)},
          {"peak", format_number(c.peak)},
          {"peak_day", format_number(c.peak_day)}};
}

}  // namespace

std::vector<std::string> preset_names() { return {"paper-baseline", "quezon-city"}; }

Scenario preset(std::string_view name) {
  Scenario s;
  s.params = baseline_parameters();
  s.base_initial = baseline_initial_state();
  if (name == "paper-baseline") {
    s.preset = "paper-baseline";
  } else if (name == "quezon-city") {
    s.preset = "quezon-city";
    s.scale = kQuezonCityScale;
    s.capacity = CapacityFunction::constant(3.5e6);
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError(fmt::format("unknown preset '{}' (known: {})", name, known));
  }
  resolve_carrying_capacity(s);
  return s;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scenario: expected an object");
  const bool has_preset = doc.contains("preset");
  if (!has_preset && !(doc.contains("parameters") && doc.contains("initial_state"))) {
    throw ValidationError(
        "scenario: missing required fields: 'preset', or both 'parameters' and "
        "'initial_state'");
  }
  reject_unknown(doc, "scenario",
                 {"preset", "parameters", "initial_state", "scale", "carrying_capacity",
                  "carrying_capacity_factor", "horizon_days", "pieces", "cost",
                  "capacity", "budget", "integrator", "accounting", "solver",
                  "strict_domain"});

  Scenario s;
  if (has_preset) {
    if (!doc.at("preset").is_string()) throw ValidationError("preset: expected a string");
    s = preset(doc.at("preset").get<std::string>());
  }

  if (doc.contains("parameters")) {
    const json& p = doc.at("parameters");
    require_object(p, "parameters");
    std::set<std::string> seen;
    for (const auto& [key, value] : p.items()) {
      const auto it = std::find_if(kParameterFields.begin(), kParameterFields.end(),
                                   [&](const auto& f) { return f.name == key; });
      if (it == kParameterFields.end() || key == "K_a") {
        throw ValidationError(fmt::format(
            "parameters: unknown field '{}' (set K_a via carrying_capacity)", key));
      }
      s.params.*(it->member) = number_field(value, "parameters." + key);
      seen.insert(key);
    }
    if (!has_preset) {
      for (const auto& f : kParameterFields) {
        if (f.name != "K_a" && !seen.count(std::string(f.name))) {
          throw ValidationError(fmt::format("parameters.{}: required", f.name));
        }
      }
    }
  }

  if (doc.contains("initial_state")) {
    const json& st = doc.at("initial_state");
    require_object(st, "initial_state");
    if (!has_preset) s.base_initial = StateVector{};
    for (const auto& [key, value] : st.items()) {
      const auto it = std::find(kCompartmentNames.begin(), kCompartmentNames.end(), key);
      if (it == kCompartmentNames.end()) {
        throw ValidationError(fmt::format("initial_state: unknown compartment '{}'", key));
      }
      s.base_initial.values[static_cast<std::size_t>(it - kCompartmentNames.begin())] =
          number_field(value, "initial_state." + key);
    }
  }

  if (doc.contains("scale")) {
    s.scale = number_field(doc.at("scale"), "scale");
    if (!(s.scale > 0.0) || !std::isfinite(s.scale)) {
      throw ValidationError("scale: must be a finite number > 0");
    }
  }
  if (doc.contains("carrying_capacity") && doc.contains("carrying_capacity_factor")) {
    throw ValidationError(
        "carrying_capacity: give either an absolute value or a factor, not both");
  }
  if (doc.contains("carrying_capacity")) {
    s.explicit_carrying_capacity = true;
    s.carrying_capacity_factor = kDefaultCarryingCapacityFactor;
    s.params.K_a = number_field(doc.at("carrying_capacity"), "carrying_capacity");
  } else if (doc.contains("carrying_capacity_factor")) {
    s.explicit_carrying_capacity = false;
    s.carrying_capacity_factor =
        number_field(doc.at("carrying_capacity_factor"), "carrying_capacity_factor");
    if (!(s.carrying_capacity_factor > 0.0)) {
      throw ValidationError("carrying_capacity_factor: must be > 0");
    }
  }
  resolve_carrying_capacity(s);

  if (doc.contains("horizon_days")) {
    s.horizon = static_cast<int>(integer_field(doc.at("horizon_days"), "horizon_days"));
  }
  if (doc.contains("pieces")) {
    s.pieces = static_cast<int>(integer_field(doc.at("pieces"), "pieces"));
  }
  if (doc.contains("cost")) {
    const json& c = doc.at("cost");
    require_object(c, "cost");
    reject_unknown(c, "cost", {"release_unit_cost", "daily_hospital_cost", "currency"});
    if (c.contains("release_unit_cost")) {
      s.cost.release_unit_cost = number_field(c.at("release_unit_cost"), "cost.release_unit_cost");
    }
    if (c.contains("daily_hospital_cost")) {
      s.cost.daily_hospital_cost =
          number_field(c.at("daily_hospital_cost"), "cost.daily_hospital_cost");
    }
    if (c.contains("currency")) {
      if (!c.at("currency").is_string()) throw ValidationError("cost.currency: expected a string");
      s.cost.currency = c.at("currency").get<std::string>();
    }
  }
  if (doc.contains("capacity")) s.capacity = parse_capacity(doc.at("capacity"));
  if (doc.contains("budget")) s.budget = number_field(doc.at("budget"), "budget");
  if (doc.contains("integrator")) {
    const json& c = doc.at("integrator");
    require_object(c, "integrator");
    reject_unknown(c, "integrator",
                   {"rel_tol", "abs_tol", "max_step", "initial_step", "max_steps",
                    "land_on_days"});
    auto& ic = s.integrator;
    if (c.contains("rel_tol")) ic.rel_tol = number_field(c.at("rel_tol"), "integrator.rel_tol");
    if (c.contains("abs_tol")) ic.abs_tol = number_field(c.at("abs_tol"), "integrator.abs_tol");
    if (c.contains("max_step")) ic.max_step = number_field(c.at("max_step"), "integrator.max_step");
    if (c.contains("initial_step")) {
      ic.initial_step = number_field(c.at("initial_step"), "integrator.initial_step");
    }
    if (c.contains("max_steps")) {
      ic.max_steps = static_cast<std::size_t>(integer_field(c.at("max_steps"), "integrator.max_steps"));
    }
    if (c.contains("land_on_days")) {
      ic.land_on_days = bool_field(c.at("land_on_days"), "integrator.land_on_days");
    }
  }
  if (doc.contains("accounting")) {
    const std::string a = doc.at("accounting").is_string() ? doc.at("accounting").get<std::string>() : "";
    if (a == "per-day") {
      s.accounting = ReleaseAccounting::PerDay;
    } else if (a == "uniform-piece-length") {
      s.accounting = ReleaseAccounting::UniformPieceLength;
    } else {
      throw ValidationError("accounting: expected per-day or uniform-piece-length");
    }
  }
  if (doc.contains("solver")) {
    const json& c = doc.at("solver");
    require_object(c, "solver");
    reject_unknown(c, "solver",
                   {"gtol", "ftol", "max_iterations", "multistart", "fd_relative_step",
                    "fd_min_step", "seed", "threads"});
    auto& sv = s.solver;
    if (c.contains("gtol")) sv.gtol = number_field(c.at("gtol"), "solver.gtol");
    if (c.contains("ftol")) sv.ftol = number_field(c.at("ftol"), "solver.ftol");
    if (c.contains("max_iterations")) {
      sv.max_iterations = static_cast<int>(integer_field(c.at("max_iterations"), "solver.max_iterations"));
    }
    if (c.contains("multistart")) {
      sv.multistart = static_cast<int>(integer_field(c.at("multistart"), "solver.multistart"));
    }
    if (c.contains("fd_relative_step")) {
      sv.fd_relative_step = number_field(c.at("fd_relative_step"), "solver.fd_relative_step");
    }
    if (c.contains("fd_min_step")) {
      sv.fd_min_step = number_field(c.at("fd_min_step"), "solver.fd_min_step");
    }
    if (c.contains("seed")) {
      sv.seed = seed_field(c.at("seed"));
    }
    if (c.contains("threads")) {
      sv.threads = static_cast<unsigned>(integer_field(c.at("threads"), "solver.threads"));
    }
  }
  if (doc.contains("strict_domain")) {
    s.strict_domain = bool_field(doc.at("strict_domain"), "strict_domain");
  }
  validate(s);
  return s;
}

Scenario parse_scenario_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return parse_scenario(json::object());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("scenario: not valid JSON ({})", e.what()));
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::string& source) {
  if (std::filesystem::is_regular_file(source)) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot read scenario file '{}'", source));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
  }
  if (source.find('/') != std::string::npos || source.ends_with(".json")) {
    throw ValidationError(fmt::format("scenario file '{}' does not exist", source));
  }
  Scenario s = preset(source);
  validate(s);
  return s;
}

json to_json(const Scenario& s) {
  json doc = json::object();
  if (!s.preset.empty()) doc["preset"] = s.preset;
  json params = json::object();
  for (const auto& f : kParameterFields) {
    if (f.name == "K_a") continue;
    params[std::string(f.name)] = format_number(s.params.*(f.member));
  }
  doc["parameters"] = params;
  json st = json::object();
  for (std::size_t i = 0; i < kStateSize; ++i) {
    st[std::string(kCompartmentNames[i])] = format_number(s.base_initial.values[i]);
  }
  doc["initial_state"] = st;
  doc["scale"] = format_number(s.scale);
  if (s.explicit_carrying_capacity) {
    doc["carrying_capacity"] = format_number(s.params.K_a);
  } else {
    doc["carrying_capacity_factor"] = format_number(s.carrying_capacity_factor);
  }
  doc["horizon_days"] = s.horizon;
  doc["pieces"] = s.pieces;
  doc["cost"] = {{"release_unit_cost", format_number(s.cost.release_unit_cost)},
                 {"daily_hospital_cost", format_number(s.cost.daily_hospital_cost)},
                 {"currency", s.cost.currency}};
  doc["capacity"] = capacity_json(s.capacity);
  doc["budget"] = format_number(s.budget);
  doc["integrator"] = {{"rel_tol", format_number(s.integrator.rel_tol)},
                       {"abs_tol", format_number(s.integrator.abs_tol)},
                       {"max_step", format_number(s.integrator.max_step)},
                       {"initial_step", format_number(s.integrator.initial_step)},
                       {"max_steps", s.integrator.max_steps},
                       {"land_on_days", s.integrator.land_on_days}};
  doc["accounting"] = s.accounting == ReleaseAccounting::PerDay ? "per-day"
                                                                : "uniform-piece-length";
  doc["solver"] = {{"gtol", format_number(s.solver.gtol)},
                   {"ftol", format_number(s.solver.ftol)},
                   {"max_iterations", s.solver.max_iterations},
                   {"multistart", s.solver.multistart},
                   {"fd_relative_step", format_number(s.solver.fd_relative_step)},
                   {"fd_min_step", format_number(s.solver.fd_min_step)},
                   {"seed", std::to_string(s.solver.seed)},
                   {"threads", s.solver.threads}};
  doc["strict_domain"] = s.strict_domain;
  return doc;
}

std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  atomic_write(path, dump_scenario(s));
}

void validate(const Scenario& s) {
  validate(s.params);
  if (!(s.params.K_a > 0.0)) throw ValidationError("carrying_capacity: must be > 0");
  if (!s.cost.currency.empty() &&
      s.cost.currency.find_first_of("\n\r\t\",") != std::string::npos) {
    throw ValidationError("cost.currency: contains separator characters");
  }
  validate(make_problem(s));
  for (std::size_t i = 0; i < kStateSize; ++i) {
    if (!std::isfinite(s.base_initial.values[i])) {
      throw ValidationError(
          fmt::format("initial_state.{}: must be finite", kCompartmentNames[i]));
    }
  }
  const DomainReport report = in_domain(s.initial(), s.params, 1e-9);
  for (const auto& c : report.checks) {
    if (!c.pass) {
      throw ValidationError(fmt::format(
          "initial_state: violates the '{}' bound (value {}, bound {})", c.name,
          format_number(c.value), format_number(c.bound)));
    }
  }
  if (s.initial().human_total() <= 0.0) {
    throw ValidationError("initial_state: human population must be positive");
  }
  if (s.strict_domain) {
    const double bound = s.params.max_invariant_release();
    if (s.capacity.max_value() > bound) {
      throw ValidationError(fmt::format(
          "strict domain: capacity {} exceeds the invariant release bound {}",
          format_number(s.capacity.max_value()), format_number(bound)));
    }
  }
}

SingleObjectiveProblem make_problem(const Scenario& s) {
  SingleObjectiveProblem p;
  p.params = s.params;
  p.initial = s.initial();
  p.horizon = s.horizon;
  p.pieces = s.pieces;
  p.cost = s.cost;
  p.capacity = s.capacity;
  p.budget = s.budget;
  p.integrator = s.integrator;
  p.accounting = s.accounting;
  p.settings = s.solver;
  return p;
}

}  // namespace wolbachia
