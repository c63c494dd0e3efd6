#include "wolbachia/experiments.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "wolbachia/errors.hpp"

namespace wolbachia {

SimulationResult simulate(const Scenario& s, const ReleaseSchedule& schedule) {
  SimulationResult out;
  out.schedule = schedule;
  out.trajectory = integrate_adaptive(s.params, s.initial(), schedule, s.integrator);
  out.daily = sample_daily(out.trajectory, s.horizon);
  out.cost = objective_from_daily(out.daily, schedule, s.cost, s.horizon, s.accounting);
  for (std::size_t d = 0; d < out.daily.size(); ++d) {
    const double j = out.daily[d][Compartment::J_h];
    if (j > out.peak_hospitalized) {
      out.peak_hospitalized = j;
      out.peak_day = static_cast<int>(d);
    }
  }
  return out;
}

double peak_reduction(const SimulationResult& baseline, const SimulationResult& run) {
  return 1.0 - run.peak_hospitalized / baseline.peak_hospitalized;
}

std::vector<std::pair<std::string, ReleaseSchedule>> standard_schemes(int horizon) {
  return {
      {"constant", ReleaseSchedule(ConstantRelease{1.0}, horizon)},
      {"linear", ReleaseSchedule(LinearDecreasingRelease{1.0}, horizon)},
      {"bump-50", ReleaseSchedule(BumpRelease{1.0, 50.0}, horizon)},
      {"bump-100", ReleaseSchedule(BumpRelease{1.0, 100.0}, horizon)},
  };
}

double default_scheme_peak(const Scenario& s) { return kSchemePeakRelease * s.scale; }

SchemeComparison release_scheme_experiment(const Scenario& s, double peak, double total) {
  if (!(peak > 0.0)) throw ValidationError("scheme peak must be > 0");
  const auto schemes = standard_schemes(s.horizon);
  std::vector<ReleaseSchedule> shapes;
  for (const auto& [name, sched] : schemes) shapes.push_back(sched);
  const auto same_peak = normalize_same_peak(shapes, peak);
  if (total <= 0.0) total = total_release(same_peak.front());
  const auto same_total = normalize_same_total(shapes, total);

  SchemeComparison out;
  const SimulationResult base = simulate(s, ReleaseSchedule::zero(s.horizon));
  out.baseline_peak = base.peak_hospitalized;
  out.baseline_peak_day = base.peak_day;
  auto run = [&](const std::vector<ReleaseSchedule>& set, std::vector<SchemeResult>& dst) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      const SimulationResult r = simulate(s, set[i]);
      SchemeResult res;
      res.name = schemes[i].first;
      res.schedule = set[i];
      res.peak_release = set[i].peak();
      res.total_release = total_release(set[i]);
      res.peak_hospitalized = r.peak_hospitalized;
      res.peak_day = r.peak_day;
      res.reduction = peak_reduction(base, r);
      dst.push_back(std::move(res));
    }
  };
  run(same_peak, out.same_peak);
  run(same_total, out.same_total);
  return out;
}

std::vector<LadderRung> capacity_ladder(const Scenario& s,
                                        const std::vector<double>& initial_capacities,
                                        double peak_capacity, double peak_day) {
  const SimulationResult base = simulate(s, ReleaseSchedule::zero(s.horizon));
  std::vector<LadderRung> out;
  for (double p0 : initial_capacities) {
    Scenario rung = s;
    rung.capacity = CapacityFunction::ramp(p0, peak_capacity, peak_day);
    SingleObjectiveProblem problem = make_problem(rung);
    problem.objective = ObjectiveKind::Total;
    LadderRung r;
    r.initial_capacity = p0;
    r.policy = solve(problem);
    const SimulationResult sim =
        simulate(rung, ReleaseSchedule(PiecewiseRelease{r.policy.values}, s.horizon));
    r.peak_hospitalized = sim.peak_hospitalized;
    r.peak_day = sim.peak_day;
    r.peak_reduction = peak_reduction(base, sim);
    r.societal_reduction = 1.0 - r.policy.cost.societal_cost / base.cost.societal_cost;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> table_names() {
  return {"unit-price-1M", "unit-price-500k", "total-cost"};
}

double policy_total_release(const std::vector<double>& values, int horizon) {
  return total_release(ReleaseSchedule(PiecewiseRelease{values}, horizon));
}

TableResult table_experiment(const Scenario& s, const std::string& name) {
  std::vector<double> capacities;
  if (name == "unit-price-1M") {
    capacities = {1e6};
  } else if (name == "unit-price-500k") {
    capacities = {5e5};
  } else if (name == "total-cost") {
    capacities = {1e6, 5e5};
  } else {
    throw ValidationError(fmt::format(
        "unknown table experiment '{}' (known: unit-price-1M, unit-price-500k, total-cost)",
        name));
  }
  TableResult out;
  out.name = name;
  for (double p0 : capacities) {
    std::vector<std::vector<double>> previous;
    for (double price : kTableUnitPrices) {
      Scenario cell = s;
      cell.capacity = CapacityFunction::ramp(p0, kRampPeakCapacity, kRampPeakDay);
      cell.cost.release_unit_cost = price;
      SingleObjectiveProblem problem = make_problem(cell);
      problem.objective = ObjectiveKind::Total;
      const OptimalPolicy policy = solve(problem, previous);
      previous = {policy.values};
      TableCell c;
      c.unit_price = price;
      c.initial_capacity = p0;
      c.total_release = policy_total_release(policy.values, s.horizon);
      c.release_cost = policy.cost.release_cost;
      c.societal_cost = policy.cost.societal_cost;
      c.total_cost = policy.cost.total_cost;
      c.policy = policy.values;
      out.cells.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace wolbachia
