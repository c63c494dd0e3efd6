#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wolbachia/errors.hpp"
#include "wolbachia/experiments.hpp"
#include "wolbachia/io.hpp"
#include "wolbachia/numeric_format.hpp"
#include "wolbachia/pareto.hpp"
#include "wolbachia/scenario.hpp"

namespace fs = std::filesystem;
using namespace wolbachia;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

// Pareto sweeps default to this ramp unless a capacity is given.
constexpr double kParetoInitialCapacity = 5e5;

struct CommonOptions {
  std::string scenario;
  std::string preset;
  std::string out;
  std::optional<std::string> budget;
  std::optional<std::string> capacity;
  std::optional<int> pieces;
  std::optional<int> horizon;
  bool strict_domain = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool uniform_piece_cost = false;
  bool record_time = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& default_out) {
  o.out = default_out;
  auto* scen = cmd->add_option("--scenario", o.scenario, "Scenario JSON file");
  auto* pre = cmd->add_option("--preset", o.preset, "Named preset (paper-baseline, quezon-city)");
  scen->excludes(pre);
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--budget", o.budget, "Release budget (currency, or inf)");
  cmd->add_option("--capacity", o.capacity,
                  "Production capacity: P0,Pmax,peakday | constant value | inf");
  cmd->add_option("--pieces", o.pieces, "Number of piecewise-constant pieces N");
  cmd->add_option("--horizon", o.horizon, "Horizon T in days");
  cmd->add_flag("--strict-domain", o.strict_domain,
                "Require releases within the forward-invariant bound");
  cmd->add_option("--seed", o.seed, "Seed for random multistart points");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--uniform-piece-cost", o.uniform_piece_cost,
                "Charge every piece ceil(T/N) days of release");
  cmd->add_flag("--record-time", o.record_time, "Add timestamps to the manifest");
}

CapacityFunction parse_capacity_flag(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    parts.push_back(parse_number(text.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 1) return CapacityFunction::constant(parts[0]);
  if (parts.size() == 3) return CapacityFunction::ramp(parts[0], parts[1], parts[2]);
  throw ValidationError("--capacity: expected P0,Pmax,peakday or a single value");
}

Scenario resolve_scenario(const CommonOptions& o) {
  Scenario s;
  if (!o.scenario.empty()) {
    if (!fs::is_regular_file(o.scenario)) {
      throw ValidationError(fmt::format("scenario file '{}' does not exist", o.scenario));
    }
    s = load_scenario(o.scenario);
  } else {
    s = load_scenario(o.preset.empty() ? "quezon-city" : o.preset);
  }
  if (o.budget) s.budget = parse_number(*o.budget);
  if (o.capacity) s.capacity = parse_capacity_flag(*o.capacity);
  if (o.pieces) s.pieces = *o.pieces;
  if (o.horizon) s.horizon = *o.horizon;
  if (o.strict_domain) s.strict_domain = true;
  if (o.seed) s.solver.seed = *o.seed;
  if (o.threads) s.solver.threads = *o.threads;
  if (o.uniform_piece_cost) s.accounting = ReleaseAccounting::UniformPieceLength;
  validate(s);
  const double bound = s.params.max_invariant_release();
  if (!s.strict_domain && s.capacity.max_value() > bound) {
    fmt::print(stderr,
               "warning: capacity {} exceeds the invariant release bound {}; "
               "positivity is not guaranteed\n",
               format_number(s.capacity.max_value()), format_number(bound));
  }
  return s;
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (!out.empty()) out += ' ';
    out += argv[i];
  }
  return out;
}

OutputWriter make_writer(const CommonOptions& o, const Scenario& s, const std::string& cmd) {
  RunRecord record;
  record.command = cmd;
  const std::string text = dump_scenario(s);
  record.scenario_sha256 = sha256_hex(text);
  record.seed = s.solver.seed;
  if (o.record_time) record.started = utc_timestamp();
  OutputWriter writer(o.out, record);
  writer.write("scenario.json", text);
  return writer;
}

void finish(OutputWriter& writer, const CommonOptions& o) {
  if (o.record_time) writer.record().finished = utc_timestamp();
  writer.finish();
  std::printf("wrote %zu files to %s\n", writer.record().outputs.size() + 1,
              writer.dir().string().c_str());
}

std::vector<double> day_axis(int horizon) {
  std::vector<double> x(static_cast<std::size_t>(horizon) + 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  return x;
}

std::vector<double> column(const std::vector<StateVector>& daily, Compartment c) {
  std::vector<double> y;
  y.reserve(daily.size());
  for (const auto& s : daily) y.push_back(s[c]);
  return y;
}

std::vector<double> release_series(const ReleaseSchedule& schedule) {
  std::vector<double> y;
  for (int d = 0; d <= schedule.horizon(); ++d) y.push_back(schedule.evaluate(d));
  return y;
}

// Largest relative difference between the adaptive run and fixed-step RK4.
double oracle_gap(const Scenario& s, const ReleaseSchedule& schedule,
                  const std::vector<StateVector>& daily) {
  const Trajectory fixed = integrate_fixed_rk4(s.params, s.initial(), schedule, 1e-3);
  double worst = 0.0;
  for (std::size_t d = 0; d < daily.size(); ++d) {
    for (std::size_t i = 0; i < kStateSize; ++i) {
      const double a = daily[d].values[i];
      const double b = fixed.states[d].values[i];
      const double scale = std::max(std::abs(b), 1.0);
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  return worst;
}

ordered_json cost_json(const CostBreakdown& c, const std::string& currency) {
  return {{"currency", currency},
          {"release_cost", c.release_cost},
          {"societal_cost", c.societal_cost},
          {"total_cost", c.total_cost}};
}

void check_strict_schedule(const Scenario& s, const ReleaseSchedule& schedule) {
  if (!s.strict_domain) return;
  const double bound = s.params.max_invariant_release();
  if (schedule.peak() > bound) {
    throw ValidationError(fmt::format(
        "strict domain: schedule peak {} exceeds the invariant release bound {}",
        format_number(schedule.peak()), format_number(bound)));
  }
}

int run_simulate(const CommonOptions& o, const std::string& schedule_spec, bool oracle,
                 const std::string& cmd) {
  const Scenario s = resolve_scenario(o);
  const ReleaseSchedule schedule = ReleaseSchedule::parse(schedule_spec, s.horizon);
  check_strict_schedule(s, schedule);
  const SimulationResult run = simulate(s, schedule);
  const SimulationResult base = simulate(s, ReleaseSchedule::zero(s.horizon));

  OutputWriter writer = make_writer(o, s, cmd);
  writer.write("trajectory.csv", trajectory_csv(run.daily, schedule, s.params));
  writer.write("costs.csv", cost_csv(run.cost, schedule));

  ordered_json summary;
  summary["schedule"] = schedule.describe();
  summary["peak_hospitalized"] = run.peak_hospitalized;
  summary["peak_day"] = run.peak_day;
  summary["baseline_peak_hospitalized"] = base.peak_hospitalized;
  summary["baseline_peak_day"] = base.peak_day;
  summary["peak_reduction"] = peak_reduction(base, run);
  summary["total_release"] = total_release(schedule);
  summary["cost"] = cost_json(run.cost, s.cost.currency);
  summary["integrator"] = {{"accepted_steps", run.trajectory.stats.accepted},
                           {"rejected_steps", run.trajectory.stats.rejected},
                           {"diagnostics", run.trajectory.diagnostics}};
  if (oracle) {
    const double gap = oracle_gap(s, schedule, run.daily);
    summary["oracle_max_relative_difference"] = gap;
    std::printf("fixed-step cross-check: max relative difference %s\n",
                format_number(gap).c_str());
  }
  writer.write("summary.json", summary.dump(2) + "\n");

  const auto days = day_axis(s.horizon);
  writer.write("hospitalized.svg",
               svg_line_chart({{"no release", days, column(base.daily, Compartment::J_h)},
                               {schedule.describe(), days, column(run.daily, Compartment::J_h)}},
                              "Hospitalized humans J_h", "day", "people"));
  writer.write("release.svg", svg_line_chart({{schedule.describe(), days, release_series(schedule)}},
                                             "Release r(t)", "day", "mosquitoes per day"));
  std::printf("peak J_h %s on day %d (%.1f%% below no release)\n",
              format_number(run.peak_hospitalized).c_str(), run.peak_day,
              100.0 * peak_reduction(base, run));
  finish(writer, o);
  return 0;
}

ordered_json policy_json(const OptimalPolicy& p, const Scenario& s) {
  const auto& d = p.diagnostics;
  ordered_json j;
  j["values"] = p.values;
  j["objective"] = p.objective;
  j["cost"] = cost_json(p.cost, s.cost.currency);
  j["total_release"] = policy_total_release(p.values, s.horizon);
  j["diagnostics"] = {{"status", d.status},
                      {"iterations", d.iterations},
                      {"objective_evaluations", d.objective_evaluations},
                      {"projected_gradient_norm", d.projected_gradient_norm},
                      {"best_start", d.best_start},
                      {"history", d.history},
                      {"at_lower", d.at_lower},
                      {"at_upper", d.at_upper},
                      {"budget_active", d.budget_active}};
  return j;
}

int run_optimize(const CommonOptions& o, bool oracle, const std::string& cmd) {
  const Scenario s = resolve_scenario(o);
  const SingleObjectiveProblem problem = make_problem(s);
  const OptimalPolicy policy = solve(problem);
  const ReleaseSchedule schedule(PiecewiseRelease{policy.values}, s.horizon);
  const SimulationResult run = simulate(s, schedule);
  const SimulationResult base = simulate(s, ReleaseSchedule::zero(s.horizon));

  OutputWriter writer = make_writer(o, s, cmd);
  writer.write("policy.json", policy_json(policy, s).dump(2) + "\n");
  writer.write("policy.csv", policy_csv(policy.values, s.horizon));
  writer.write("trajectory.csv", trajectory_csv(run.daily, schedule, s.params));
  writer.write("costs.csv", cost_csv(run.cost, schedule));

  ordered_json summary;
  summary["peak_hospitalized"] = run.peak_hospitalized;
  summary["peak_day"] = run.peak_day;
  summary["baseline_peak_hospitalized"] = base.peak_hospitalized;
  summary["baseline_peak_day"] = base.peak_day;
  summary["peak_reduction"] = peak_reduction(base, run);
  summary["baseline_societal_cost"] = base.cost.societal_cost;
  summary["cost"] = cost_json(policy.cost, s.cost.currency);
  summary["solver_status"] = policy.diagnostics.status;
  if (oracle) {
    const double gap = oracle_gap(s, schedule, run.daily);
    summary["oracle_max_relative_difference"] = gap;
    std::printf("fixed-step cross-check: max relative difference %s\n",
                format_number(gap).c_str());
  }
  writer.write("summary.json", summary.dump(2) + "\n");

  const auto days = day_axis(s.horizon);
  writer.write("hospitalized.svg",
               svg_line_chart({{"no release", days, column(base.daily, Compartment::J_h)},
                               {"optimal", days, column(run.daily, Compartment::J_h)}},
                              "Hospitalized humans J_h", "day", "people"));
  writer.write("release.svg", svg_line_chart({{"optimal", days, release_series(schedule)}},
                                             "Optimal release", "day", "mosquitoes per day"));
  std::printf("policy:");
  for (double v : policy.values) std::printf(" %s", format_number(std::round(v)).c_str());
  std::printf("\ntotal cost %s %s (release %s, societal %s); peak J_h %.1f%% below no release\n",
              format_number(policy.cost.total_cost).c_str(), s.cost.currency.c_str(),
              format_number(policy.cost.release_cost).c_str(),
              format_number(policy.cost.societal_cost).c_str(),
              100.0 * peak_reduction(base, run));
  finish(writer, o);
  return 0;
}

int run_pareto(const CommonOptions& o, int k, double bmax, bool cold, bool verify,
               const std::string& cmd) {
  Scenario s = resolve_scenario(o);
  if (!o.capacity && o.scenario.empty()) {
    s.capacity = CapacityFunction::ramp(kParetoInitialCapacity, kRampPeakCapacity, kRampPeakDay);
    validate(s);
  }
  const SingleObjectiveProblem base = make_problem(s);
  const ParetoFront front = epsilon_constraint_sweep(base, {k, bmax, !cold});

  OutputWriter writer = make_writer(o, s, cmd);
  writer.write("pareto.csv", pareto_csv(front, s.pieces));
  ordered_json j = ordered_json::array();
  for (const auto& p : front.points) {
    j.push_back({{"k", p.k},
                 {"budget_cap", p.budget_cap},
                 {"release_cost", p.release_cost},
                 {"societal_cost", p.societal_cost},
                 {"failed", p.failed},
                 {"failure", p.failure},
                 {"dominated", p.dominated},
                 {"policy", p.policy}});
  }
  ordered_json doc;
  doc["count"] = k;
  doc["max_budget"] = bmax;
  doc["warm_start"] = !cold;
  doc["points"] = j;
  if (verify) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : verify_cold_start(base, front, 10, s.solver.seed)) {
      checks.push_back({{"k", c.k}, {"warm", c.warm}, {"cold", c.cold},
                        {"relative_gap", c.relative_gap}});
      std::printf("k=%d warm %s cold %s gap %.3g%%\n", c.k, format_number(c.warm).c_str(),
                  format_number(c.cold).c_str(), 100.0 * c.relative_gap);
    }
    doc["cold_start_checks"] = checks;
  }
  writer.write("pareto.json", doc.dump(2) + "\n");

  ChartSeries all{"all points", {}, {}};
  ChartSeries staircase{"non-dominated", {}, {}};
  for (const auto& p : front.points) {
    if (p.failed) continue;
    all.x.push_back(p.release_cost);
    all.y.push_back(p.societal_cost);
  }
  for (const auto& p : front.frontier()) {
    staircase.x.push_back(p.release_cost);
    staircase.y.push_back(p.societal_cost);
  }
  writer.write("pareto.svg", svg_line_chart({all, staircase}, "Pareto front",
                                            "release cost", "societal cost"));
  std::printf("%zu points, %zu failed, %zu non-dominated\n", front.points.size(),
              front.failed_count(), front.frontier().size());
  finish(writer, o);
  return front.failed_count() == front.points.size() ? kExitNumerical : 0;
}

std::string table_csv(const TableResult& t) {
  std::string out = "initial_capacity,unit_price,total_release,release_cost,societal_cost,total_cost\n";
  for (const auto& c : t.cells) {
    out += fmt::format("{},{},{},{},{},{}\n", format_number(c.initial_capacity),
                       format_number(c.unit_price), format_number(c.total_release),
                       format_number(c.release_cost), format_number(c.societal_cost),
                       format_number(c.total_cost));
  }
  return out;
}

int run_tables(const CommonOptions& o, const std::string& name, const std::string& cmd) {
  const Scenario s = resolve_scenario(o);
  std::vector<std::string> names;
  if (name == "all") {
    names = table_names();
    names.push_back("release-schemes");
    names.push_back("capacity-ladder");
  } else {
    names = {name};
  }
  OutputWriter writer = make_writer(o, s, cmd);
  for (const auto& n : names) {
    if (n == "release-schemes") {
      const SchemeComparison c = release_scheme_experiment(s, default_scheme_peak(s));
      std::string csv = "comparison,scheme,peak_release,total_release,peak_hospitalized,peak_day,reduction\n";
      auto rows = [&](const char* label, const std::vector<SchemeResult>& rs) {
        for (const auto& r : rs) {
          csv += fmt::format("{},{},{},{},{},{},{}\n", label, r.name,
                             format_number(r.peak_release), format_number(r.total_release),
                             format_number(r.peak_hospitalized), r.peak_day,
                             format_number(r.reduction));
          std::printf("%-10s %-9s peak J_h reduction %.1f%%\n", label, r.name.c_str(),
                      100.0 * r.reduction);
        }
      };
      rows("same-peak", c.same_peak);
      rows("same-total", c.same_total);
      writer.write("release-schemes.csv", csv);
    } else if (n == "capacity-ladder") {
      const auto ladder = capacity_ladder(s, {2e5, 5e5, 7e5, 1e6});
      std::string csv = "initial_capacity,societal_cost,total_cost,peak_hospitalized,peak_day,peak_reduction,societal_reduction";
      for (int i = 1; i <= s.pieces; ++i) csv += fmt::format(",r_{}", i);
      csv += '\n';
      for (const auto& r : ladder) {
        csv += fmt::format("{},{},{},{},{},{},{}", format_number(r.initial_capacity),
                           format_number(r.policy.cost.societal_cost),
                           format_number(r.policy.cost.total_cost),
                           format_number(r.peak_hospitalized), r.peak_day,
                           format_number(r.peak_reduction), format_number(r.societal_reduction));
        for (double v : r.policy.values) csv += "," + format_number(v);
        csv += '\n';
        std::printf("P0 %-8s peak J_h reduction %.1f%%, societal cost %s\n",
                    format_number(r.initial_capacity).c_str(), 100.0 * r.peak_reduction,
                    format_number(r.policy.cost.societal_cost).c_str());
      }
      writer.write("capacity-ladder.csv", csv);
    } else {
      const TableResult t = table_experiment(s, n);
      writer.write(n + ".csv", table_csv(t));
      for (const auto& c : t.cells) {
        std::printf("%-16s P0 %-8s price %-4s total release %s, total cost %s\n", n.c_str(),
                    format_number(c.initial_capacity).c_str(),
                    format_number(c.unit_price).c_str(),
                    format_number(std::round(c.total_release)).c_str(),
                    format_number(c.total_cost).c_str());
      }
    }
  }
  finish(writer, o);
  return 0;
}

int run_validate(const CommonOptions& o, const std::string& write_path) {
  const Scenario s = resolve_scenario(o);
  const DomainReport report = in_domain(s.initial(), s.params, 1e-9);
  std::printf("scenario ok: preset '%s', T = %d, N = %d, K_a = %s\n",
              s.preset.empty() ? "(custom)" : s.preset.c_str(), s.horizon, s.pieces,
              format_number(s.params.K_a).c_str());
  for (const auto& c : report.checks) {
    std::printf("  %-20s value %-14s bound %-14s %s\n", c.name.c_str(),
                format_number(c.value).c_str(), format_number(c.bound).c_str(),
                c.pass ? "pass" : "FAIL");
  }
  std::printf("  invariant release bound (psi + mu_a) K_a = %s\n",
              format_number(s.params.max_invariant_release()).c_str());
  if (!write_path.empty()) save_scenario(s, write_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dengue/Wolbachia release model: simulation and optimal release planning"};
  app.require_subcommand(1);

  CommonOptions sim_opts, opt_opts, par_opts, tab_opts, val_opts;
  std::string schedule = "zero";
  bool sim_oracle = false, opt_oracle = false, cold = false, verify = false;
  int k = 100;
  double bmax = 5e8;
  std::string table = "all";
  std::string write_path;

  auto* sim = app.add_subcommand("simulate", "Integrate one release schedule");
  add_common(sim, sim_opts, "out/simulate");
  sim->add_option("--schedule", schedule,
                  "zero | constant:R | linear:M | bump:M@DAY | piecewise:a,b,...")
      ->capture_default_str();
  sim->add_flag("--oracle", sim_oracle, "Cross-check against fixed-step RK4 (h = 0.001)");

  auto* opt = app.add_subcommand("optimize", "Optimal piecewise-constant release");
  add_common(opt, opt_opts, "out/optimize");
  opt->add_flag("--oracle", opt_oracle, "Cross-check the optimal run against fixed-step RK4");

  auto* par = app.add_subcommand("pareto", "Release cost vs societal cost front");
  add_common(par, par_opts, "out/pareto");
  par->add_option("--k", k, "Number of budget caps")->capture_default_str();
  par->add_option("--bmax", bmax, "Largest budget cap")->capture_default_str();
  par->add_flag("--cold", cold, "Solve every cap from the default starts (parallel)");
  par->add_flag("--verify-cold", verify, "Re-solve 10 random caps cold and report the gap");

  auto* tab = app.add_subcommand("tables", "Scripted experiments");
  add_common(tab, tab_opts, "out/tables");
  tab->add_option("name", table,
                  "unit-price-1M | unit-price-500k | total-cost | release-schemes | "
                  "capacity-ladder | all")
      ->capture_default_str();

  auto* val = app.add_subcommand("validate", "Load and check a scenario");
  add_common(val, val_opts, "");
  val->add_option("--write", write_path, "Save the resolved scenario to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const std::string cmd = command_line(argc, argv);
  try {
    if (*sim) return run_simulate(sim_opts, schedule, sim_oracle, cmd);
    if (*opt) return run_optimize(opt_opts, opt_oracle, cmd);
    if (*par) {
      if (k < 2 || !(bmax > 0.0)) throw ValidationError("pareto needs --k >= 2 and --bmax > 0");
      return run_pareto(par_opts, k, bmax, cold, verify, cmd);
    }
    if (*tab) return run_tables(tab_opts, table, cmd);
    if (*val) return run_validate(val_opts, write_path);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const IntegrationError& e) {
    std::fprintf(stderr, "integration failed on day %s (compartment %s): %s\n",
                 format_number(e.day()).c_str(), e.compartment().c_str(), e.what());
    return kExitNumerical;
  } catch (const ComputationError& e) {
    std::fprintf(stderr, "numerical error in %s: %s\n", e.compartment().c_str(), e.what());
    return kExitNumerical;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
