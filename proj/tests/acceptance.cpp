// Acceptance run: one PASS/FAIL line per criterion; exits non-zero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hems/format.hpp"
#include "hems/model_core.hpp"
#include "hems/mpc.hpp"
#include "hems/oracles.hpp"
#include "hems/sim.hpp"

using namespace hems;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double value, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

sim::Scenario week(std::uint64_t seed = kSeed) {
  sim::SyntheticOptions opts;
  opts.seed = seed;
  opts.days = 7;
  return sim::synthetic_scenario(opts);
}

sim::Scenario year() {
  sim::SyntheticOptions opts;
  opts.seed = kSeed;
  opts.days = 365;
  return sim::synthetic_scenario(opts);
}

// Comfort grid on the shipped week, keyed by (heater, strategy, flexibility).
using Key = std::tuple<HeaterVariant, mpc::BoundStrategy, mpc::Flexibility>;

const std::map<Key, sim::Metrics>& week_grid() {
  static const auto grid = [] {
    std::map<Key, sim::Metrics> out;
    const auto rows = sim::run_case_grid(week(), BuildingSpec{}, sim::comfort_grid(), sim::default_daily_loads());
    for (const auto& row : rows) {
      const auto& c = row.cell.config;
      if (!row.metrics) throw std::runtime_error("grid cell failed: " + row.error);
      out[{c.heater, c.bound_strategy, c.flexibility}] = *row.metrics;
    }
    return out;
  }();
  return grid;
}

std::string label(HeaterVariant h, mpc::BoundStrategy s) {
  return std::string(to_string(h)) + " " + std::string(mpc::to_string(s));
}

Outcome lp_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = oracle::run_lp_vertex_suite(kSeed, 500);
  const double secs = seconds_since(start);
  return {r.passed && r.max_error <= 1e-6 && secs < 30.0,
          std::to_string(r.cases) + " LPs, " + std::to_string(r.failures) + " mismatches, max |diff| " +
              format_number(r.max_error) + ", " + num(secs, 2) + " s"};
}

Outcome schedule_oracle() {
  const auto r = oracle::run_schedule_suite(kSeed, 1000);
  mpc::UninterruptibleLoad load;
  load.name = "example";
  load.cycle_phases = {1.0, 0.5};
  load.window = {0, 1, 2, 3};
  const std::vector<double> prices = {0.1, 0.2, 0.05, 0.3};
  const auto s = mpc::schedule_uninterruptible(load, prices, 0.25);
  const bool example = s.start == 0 && std::abs(s.cost - 0.05) < 1e-15;
  return {r.passed && example, std::to_string(r.cases) + " random loads, " + std::to_string(r.failures) +
                                   " mismatches; worked example start " + std::to_string(s.start + 1) +
                                   " (1-based), cost " + format_number(s.cost) + " EUR"};
}

Outcome decomposition_oracle() {
  const auto r = oracle::run_decomposition_suite(kSeed, 200);
  return {r.passed && r.max_error <= 1e-9,
          std::to_string(r.cases) + " instances, " + std::to_string(r.failures) + " mismatches, max |diff| " +
              format_number(r.max_error)};
}

Outcome noflex_equality() {
  std::size_t compared = 0;
  std::string worst;
  for (const std::uint64_t seed : {kSeed, kSeed + 1}) {
    const auto scenario = week(seed);
    for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
      sim::SimulationResult runs[2];
      int i = 0;
      for (const auto strategy : {mpc::BoundStrategy::PriceIndependent, mpc::BoundStrategy::PriceDependent}) {
        const auto cell = sim::make_cell(heater, strategy, mpc::Flexibility::NoFlex);
        runs[i++] = sim::run_receding_horizon(scenario, BuildingSpec{}, cell.config, cell.comfort,
                                              sim::default_daily_loads());
      }
      const auto& a = runs[0];
      const auto& b = runs[1];
      const bool same = a.controls == b.controls && a.states == b.states && a.building_power == b.building_power &&
                        a.electricity_cost == b.electricity_cost;
      ++compared;
      if (!same) worst = std::string(to_string(heater)) + " seed " + std::to_string(seed) + " differs";
    }
  }
  return {worst.empty(), worst.empty() ? std::to_string(compared) + " scenario/heater pairs with identical plans"
                                       : worst};
}

Outcome flexibility_monotonicity() {
  const auto& g = week_grid();
  bool ok = true;
  std::string detail;
  for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
    for (const auto strategy : {mpc::BoundStrategy::PriceIndependent, mpc::BoundStrategy::PriceDependent}) {
      const double no = g.at({heater, strategy, mpc::Flexibility::NoFlex}).annual_cost;
      const double fl = g.at({heater, strategy, mpc::Flexibility::Flex}).annual_cost;
      const double ex = g.at({heater, strategy, mpc::Flexibility::ExtraFlex}).annual_cost;
      const double drop = (no - ex) / no;
      ok = ok && no >= fl && fl >= ex && drop >= 0.01;
      detail += label(heater, strategy) + " " + num(no, 2) + " >= " + num(fl, 2) + " >= " + num(ex, 2) + " (-" +
                num(100.0 * drop, 1) + "%); ";
    }
  }
  return {ok, detail};
}

Outcome strategy_order() {
  const auto& g = week_grid();
  bool ok = true;
  std::string detail;
  for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
    for (const auto flex : {mpc::Flexibility::Flex, mpc::Flexibility::ExtraFlex}) {
      const double pi = g.at({heater, mpc::BoundStrategy::PriceIndependent, flex}).annual_cost;
      const double pd = g.at({heater, mpc::BoundStrategy::PriceDependent, flex}).annual_cost;
      ok = ok && pd >= pi - 1e-6;
      detail += std::string(to_string(heater)) + " " + std::string(mpc::to_string(flex)) + " PD " + num(pd, 2) +
                " vs PI " + num(pi, 2) + "; ";
    }
  }
  return {ok, detail};
}

Outcome low_price_share() {
  const auto& g = week_grid();
  bool ok = true;
  std::string detail;
  for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
    for (const auto strategy : {mpc::BoundStrategy::PriceIndependent, mpc::BoundStrategy::PriceDependent}) {
      const double no = g.at({heater, strategy, mpc::Flexibility::NoFlex}).share_building_lowprice_pct;
      const double ex = g.at({heater, strategy, mpc::Flexibility::ExtraFlex}).share_building_lowprice_pct;
      ok = ok && ex > no;
      detail += label(heater, strategy) + " " + num(no, 1) + "% -> " + num(ex, 1) + "%; ";
    }
  }
  return {ok, detail};
}

double fridge_after(double dt, double horizon_seconds) {
  BuildingSpec spec;
  spec.ua_room_ambient = 0.0;
  spec.ua_floor_room = 0.0;
  spec.ua_water_floor = 0.0;
  spec.ua_waterheater_ambient = 0.0;
  spec.internal_gain_per_occupancy = 0.0;
  spec.water_specific_heat = 0.0;
  spec.cap_room = 1e15;  // fixed 20 degC bath
  const auto steps = static_cast<std::size_t>(horizon_seconds / dt);
  const std::vector<DisturbanceVector> z(steps);
  const auto model = build_discrete_model(spec, HeaterVariant::Hvac, z, dt);
  auto x = StateVector::make(HeaterVariant::Hvac, 20.0, 0.0, 0.0, 5.0, 55.0);
  for (std::size_t t = 0; t < steps; ++t) x = step(model, t, x, ControlVector{}, z[t]);
  return x[State::Fridge];
}

Outcome euler_convergence() {
  const double horizon = 7200.0;
  const double k = BuildingSpec{}.ua_room_fridge / BuildingSpec{}.cap_fridge;
  const double exact = 20.0 - 15.0 * std::exp(-k * horizon);
  const double e900 = std::abs(fridge_after(900.0, horizon) - exact);
  const double e450 = std::abs(fridge_after(450.0, horizon) - exact);
  const double e225 = std::abs(fridge_after(225.0, horizon) - exact);
  const double r1 = e900 / e450;
  const double r2 = e450 / e225;
  return {r1 >= 1.8 && r1 <= 2.2 && r2 >= 1.8 && r2 <= 2.2,
          "error ratios " + num(r1, 4) + " (900/450 s), " + num(r2, 4) + " (450/225 s)"};
}

struct YearRun {
  sim::SimulationResult result;
  double seconds = 0.0;
};

const sim::Scenario& year_scenario() {
  static const auto s = year();
  return s;
}

const YearRun& year_run(HeaterVariant heater) {
  static std::map<HeaterVariant, YearRun> runs;
  auto it = runs.find(heater);
  if (it == runs.end()) {
    const auto cell = sim::make_cell(heater, mpc::BoundStrategy::PriceIndependent, mpc::Flexibility::Flex);
    const auto start = std::chrono::steady_clock::now();
    YearRun run;
    run.result = sim::run_receding_horizon(year_scenario(), BuildingSpec{}, cell.config, cell.comfort,
                                           sim::default_daily_loads());
    run.seconds = seconds_since(start);
    it = runs.emplace(heater, std::move(run)).first;
  }
  return it->second;
}

Outcome replay_exactness() {
  const auto& scenario = year_scenario();
  double worst_state = 0.0;
  double worst_power = 0.0;
  std::size_t periods = 0;
  for (const auto heater : {HeaterVariant::Hvac, HeaterVariant::FloorHeating}) {
    const auto& r = year_run(heater).result;
    const auto dist = scenario.disturbances(r.building, 0, scenario.size());
    const auto model = build_discrete_model(r.building, heater, dist, scenario.dt);
    StateVector prev = r.x0;
    for (std::size_t t = 0; t < r.size(); ++t) {
      const auto next = step(model, t, prev, r.controls[t], dist[t]);
      for (const State s : active_states(heater)) {
        worst_state = std::max(worst_state, std::abs(next[s] - r.states[t][s]));
      }
      const double power = r.controls[t].electrical_kw() + r.load_power[t] + scenario.standby[t];
      worst_power = std::max(worst_power, std::abs(power - r.building_power[t]));
      prev = r.states[t];
    }
    periods += r.size();
  }
  return {worst_state <= 1e-9 && worst_power <= 1e-9,
          std::to_string(periods) + " committed periods (HVAC and FH years), max state error " +
              format_number(worst_state) + " degC, max power-identity error " + format_number(worst_power) +
              " kW"};
}

Outcome ua_direction() {
  const auto rows = sim::run_case_grid(week(), BuildingSpec{}, sim::ua_sweep_grid(HeaterVariant::Hvac),
                                       sim::default_daily_loads());
  bool ok = true;
  double prev = -1.0;
  std::string detail;
  for (const auto& row : rows) {
    if (!row.metrics) return {false, "factor " + num(row.cell.config.ua_ra_factor, 1) + " failed: " + row.error};
    const double cost = row.metrics->annual_cost;
    ok = ok && cost >= prev;
    prev = cost;
    detail += "x" + num(row.cell.config.ua_ra_factor, 1) + " " + num(cost, 2) + " EUR; ";
  }
  return {ok, detail};
}

Outcome performance() {
  const auto& run = year_run(HeaterVariant::Hvac);
  double worst_day = 0.0;
  const auto scenario = week();
  for (const auto heater : {HeaterVariant::Hvac, HeaterVariant::FloorHeating}) {
    const auto cell = sim::make_cell(heater, mpc::BoundStrategy::PriceIndependent, mpc::Flexibility::Flex);
    const auto x0 = sim::default_initial_state(heater);
    const auto problem =
        sim::horizon_problem(scenario, BuildingSpec{}, cell.config, cell.comfort, sim::default_daily_loads(), 0, x0);
    const auto start = std::chrono::steady_clock::now();
    mpc::solve_horizon(problem);
    worst_day = std::max(worst_day, seconds_since(start));
  }
  const auto& r = run.result;
  return {run.seconds < 600.0 && worst_day < 1.0 && r.size() == 35040 && r.horizons_solved == 365,
          "HVAC year " + std::to_string(r.size()) + " periods, " + std::to_string(r.horizons_solved) +
              " horizons in " + num(run.seconds, 1) + " s; single two-day horizon solve " + num(worst_day, 3) +
              " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", lp_oracle},          {"AC2", schedule_oracle},        {"AC3", decomposition_oracle},
      {"AC4", noflex_equality},    {"AC5", flexibility_monotonicity}, {"AC6", strategy_order},
      {"AC7", low_price_share},    {"AC8", euler_convergence},      {"AC9", replay_exactness},
      {"AC10", ua_direction},      {"AC11", performance},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
