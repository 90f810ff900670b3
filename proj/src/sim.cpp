#include "hems/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace hems::sim {

namespace {

constexpr double kSecondsPerDay = 86400.0;

template <class T>
std::vector<T> slice_of(const std::vector<T>& v, std::size_t begin, std::size_t end) {
  return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end));
}

// Resamples a piecewise-constant 15-minute profile to periods of dt seconds
// by averaging power over each period.
std::vector<double> resample_phases(const std::vector<double>& quarter_hours, double dt) {
  const double total = 900.0 * static_cast<double>(quarter_hours.size());
  const auto n = static_cast<std::size_t>(std::ceil(total / dt - 1e-9));
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * dt;
    const double b = std::min(total, a + dt);
    double energy = 0.0;
    for (std::size_t q = 0; q < quarter_hours.size(); ++q) {
      const double qa = 900.0 * static_cast<double>(q);
      const double overlap = std::min(b, qa + 900.0) - std::max(a, qa);
      if (overlap > 0.0) energy += overlap * quarter_hours[q];
    }
    out[k] = energy / dt;
  }
  return out;
}

}  // namespace

std::size_t Scenario::periods_per_day() const {
  return static_cast<std::size_t>(std::llround(kSecondsPerDay / dt));
}

std::size_t Scenario::first_period_offset() const {
  if (timestamps.empty()) return 0;
  const std::int64_t day = 86400;
  const std::int64_t sod = ((timestamps.front() % day) + day) % day;
  return static_cast<std::size_t>(static_cast<double>(sod) / dt);
}

void Scenario::validate() const {
  if (!(dt > 0.0)) throw SimError("scenario step must be positive");
  const double per_day = kSecondsPerDay / dt;
  if (std::abs(per_day - std::round(per_day)) > 1e-9) throw SimError("scenario step must divide 86400 s");
  const std::size_t n = size();
  if (n == 0) throw SimError("scenario is empty");
  if (timestamps.size() != n || ambient.size() != n || irradiance.size() != n || occupancy.size() != n ||
      hot_water.size() != n || standby.size() != n) {
    throw SimError("scenario series have different lengths");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(prices[t])) throw SimError("non-finite price at period " + std::to_string(t));
    if (!std::isfinite(ambient[t])) throw SimError("non-finite ambient at period " + std::to_string(t));
    if (!(irradiance[t] >= 0.0)) throw SimError("negative irradiance at period " + std::to_string(t));
    if (!(occupancy[t] >= 0.0)) throw SimError("negative occupancy at period " + std::to_string(t));
    if (!(hot_water[t] >= 0.0)) throw SimError("negative hot-water draw at period " + std::to_string(t));
    if (!std::isfinite(standby[t])) throw SimError("non-finite standby at period " + std::to_string(t));
    if (t > 0 && static_cast<double>(timestamps[t] - timestamps[t - 1]) != dt) {
      throw SimError("timestamps not spaced by dt at period " + std::to_string(t));
    }
  }
  const auto sod = ((timestamps.front() % 86400) + 86400) % 86400;
  if (std::fmod(static_cast<double>(sod), dt) != 0.0) throw SimError("first timestamp is not on a period boundary");
}

std::vector<DisturbanceVector> Scenario::disturbances(const BuildingSpec& building, std::size_t begin,
                                                      std::size_t end) const {
  std::vector<DisturbanceVector> out(end - begin);
  for (std::size_t t = begin; t < end; ++t) {
    auto& z = out[t - begin];
    z.ambient = ambient[t];
    z.occupancy = occupancy[t];
    z.hot_water_draw = hot_water[t];
    z.solar_illuminance = solar_illuminance(irradiance[t], building.window_area, building.lum_efficacy_daylight);
    z.standby = standby[t];
  }
  return out;
}

Scenario Scenario::slice(std::size_t begin, std::size_t end) const {
  Scenario s;
  s.dt = dt;
  s.timestamps = slice_of(timestamps, begin, end);
  s.prices = slice_of(prices, begin, end);
  s.ambient = slice_of(ambient, begin, end);
  s.irradiance = slice_of(irradiance, begin, end);
  s.occupancy = slice_of(occupancy, begin, end);
  s.hot_water = slice_of(hot_water, begin, end);
  s.standby = slice_of(standby, begin, end);
  return s;
}

Scenario synthetic_scenario(const SyntheticOptions& options) {
  Scenario s;
  s.dt = options.dt;
  const double per_day_d = kSecondsPerDay / options.dt;
  if (!(options.dt > 0.0) || std::abs(per_day_d - std::round(per_day_d)) > 1e-9) {
    throw SimError("synthetic scenario step must divide 86400 s");
  }
  const auto per_day = static_cast<std::size_t>(std::llround(per_day_d));
  const std::size_t n = per_day * options.days;
  constexpr std::int64_t kEpoch2019 = 1546300800;  // 2019-01-01T00:00:00Z
  const double two_pi = 2.0 * std::numbers::pi;
  const double hours_per_period = options.dt / 3600.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  s.timestamps.resize(n);
  s.prices.resize(n);
  s.ambient.resize(n);
  s.irradiance.resize(n);
  s.occupancy.resize(n);
  s.hot_water.resize(n);
  s.standby.assign(n, 0.05);

  double weather = 0.0;  // AR(1) anomaly of the ambient temperature
  for (std::size_t d = 0; d < options.days; ++d) {
    const std::size_t doy = (options.first_day_of_year + d) % 365;
    // 1 January 2019 was a Tuesday.
    const std::size_t weekday = (doy + 1) % 7;  // 0 = Monday
    const bool weekend = weekday >= 5;
    const double season = std::cos(two_pi * (static_cast<double>(doy) - 15.0) / 365.0);  // 1 mid-January
    const double day_length = 12.0 - 4.0 * season;
    const double sunrise = 12.5 - day_length / 2.0;
    const double clearness = 0.3 + 0.7 * unit(rng);
    const double peak_irradiance = (450.0 - 300.0 * season) * clearness;
    const double price_level = 1.0 + 0.1 * (2.0 * unit(rng) - 1.0);

    for (std::size_t k = 0; k < per_day; ++k) {
      const std::size_t t = d * per_day + k;
      const double hour = static_cast<double>(k) * hours_per_period;
      s.timestamps[t] = kEpoch2019 + static_cast<std::int64_t>(options.first_day_of_year + d) * 86400 +
                        static_cast<std::int64_t>(std::llround(static_cast<double>(k) * options.dt));

      weather = 0.995 * weather + 0.1 * noise(rng);
      s.ambient[t] = 10.0 - 8.0 * season - 3.0 * std::cos(two_pi * (hour - 3.0) / 24.0) + weather;

      const double solar_phase = (hour - sunrise) / day_length;
      s.irradiance[t] = solar_phase > 0.0 && solar_phase < 1.0
                            ? peak_irradiance * std::pow(std::sin(std::numbers::pi * solar_phase), 2.0)
                            : 0.0;

      double price = 0.18;
      if (hour < 6.0) price = 0.11;
      else if (hour >= 7.0 && hour < 9.0) price = 0.30;
      else if (hour >= 12.0 && hour < 15.0) price = 0.16;
      else if (hour >= 17.0 && hour < 21.0) price = 0.34;
      else if (hour >= 22.0) price = 0.14;
      s.prices[t] = std::round((price * price_level + 0.005 * noise(rng)) * 1e5) / 1e5;

      const bool home = weekend ? (hour >= 8.0 && hour < 23.0)
                                : ((hour >= 6.5 && hour < 8.5) || (hour >= 17.0 && hour < 23.0));
      s.occupancy[t] = home ? 1.0 : 0.0;

      // 45 litres a day: 12 in the morning, 8 at noon, 25 in the evening.
      double litres_per_hour = 0.0;
      const double morning = weekend ? 9.0 : 7.0;
      if (hour >= morning && hour < morning + 1.0) litres_per_hour = 12.0;
      else if (hour >= 12.0 && hour < 13.0) litres_per_hour = 8.0;
      else if (hour >= 19.0 && hour < 21.0) litres_per_hour = 12.5;
      s.hot_water[t] = litres_per_hour * hours_per_period;
    }
  }
  return s;
}

void DailyLoad::validate(std::size_t periods_per_day) const {
  if (phases_kw.empty()) throw SimError("load '" + name + "' has no phases");
  for (const double p : phases_kw) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw SimError("load '" + name + "' has a negative phase power");
  }
  if (window_begin >= window_end || window_end > periods_per_day) {
    throw SimError("load '" + name + "' has an empty or wrapping window");
  }
  if (window_end - window_begin < phases_kw.size()) {
    throw SimError("load '" + name + "': window shorter than its cycle");
  }
}

std::vector<DailyLoad> default_daily_loads(double dt) {
  const auto per_day = static_cast<std::size_t>(std::llround(kSecondsPerDay / dt));
  auto at = [&](double hour) { return static_cast<std::size_t>(std::llround(hour * 3600.0 / dt)); };
  // Placeholder 15-minute profiles [kW]; override them from the config.
  return {
      {"washing_machine", resample_phases({2.0, 0.5, 0.3, 0.3, 0.6, 0.6}, dt), at(6.0), at(14.0)},
      {"dishwasher_am", resample_phases({1.8, 0.1, 0.1, 1.8, 0.2, 0.1}, dt), at(6.0), at(14.0)},
      {"dishwasher_pm", resample_phases({1.8, 0.1, 0.1, 1.8, 0.2, 0.1}, dt), at(16.0), per_day},
      {"tumble_dryer", resample_phases({2.2, 2.2, 2.2, 2.0, 1.5, 0.5}, dt), at(15.0), per_day},
      {"oven", resample_phases({2.0, 1.2, 1.0, 1.0}, dt), at(10.0), at(15.0)},
  };
}

void SimulationConfig::validate() const {
  if (commit_len < 1) throw SimError("commit_len must be at least 1");
  if (!(ua_ra_factor > 0.0) || !std::isfinite(ua_ra_factor)) throw SimError("ua_ra_factor must be positive");
  if (initial_state && !initial_state->matches(heater)) {
    throw SimError("initial state does not match the heater variant");
  }
}

StateVector default_initial_state(HeaterVariant variant) {
  return StateVector::make(variant, 20.0, 20.0, 20.0, 4.5, 55.0);
}

BuildingSpec effective_building(const BuildingSpec& building, const SimulationConfig& config) {
  BuildingSpec spec = building;
  spec.ua_room_ambient *= config.ua_ra_factor;
  return spec;
}

mpc::HorizonProblem horizon_problem(const Scenario& scenario, const BuildingSpec& building,
                                    const SimulationConfig& config, const mpc::ComfortProfile& comfort,
                                    const std::vector<DailyLoad>& loads, std::size_t begin, const StateVector& x0) {
  const std::size_t n = scenario.size();
  if (begin >= n) throw SimError("horizon start " + std::to_string(begin) + " outside the scenario");
  const std::size_t per_day = scenario.periods_per_day();
  const std::size_t end = std::min(n, begin + config.commit_len + config.lookahead_len);
  const std::size_t first = (scenario.first_period_offset() + begin) % per_day;

  // One cycle per load and calendar day whose window lies inside the horizon.
  std::vector<mpc::UninterruptibleLoad> day_loads;
  for (std::size_t day_start = begin - first; day_start < end; day_start += per_day) {
    for (const auto& load : loads) {
      const std::size_t wb = day_start + load.window_begin;
      const std::size_t we = day_start + load.window_end;
      if (wb < begin || we > end) continue;
      mpc::UninterruptibleLoad instance;
      instance.name = load.name;
      instance.cycle_phases = load.phases_kw;
      for (std::size_t t = wb; t < we; ++t) instance.window.push_back(t - begin);
      day_loads.push_back(std::move(instance));
    }
  }
  return mpc::make_horizon_problem(building, config.heater, x0, slice_of(scenario.prices, begin, end),
                                   scenario.disturbances(building, begin, end), comfort, std::move(day_loads),
                                   scenario.dt, per_day, first, config.lighting_enabled);
}

SimulationResult run_receding_horizon(const Scenario& scenario, const BuildingSpec& building,
                                      const SimulationConfig& config, const mpc::ComfortProfile& comfort,
                                      const std::vector<DailyLoad>& loads) {
  scenario.validate();
  config.validate();
  comfort.validate();
  const std::size_t n = scenario.size();
  const std::size_t per_day = scenario.periods_per_day();
  if (n % config.commit_len != 0) {
    throw SimError("scenario length " + std::to_string(n) + " is not a multiple of commit_len " +
                   std::to_string(config.commit_len));
  }
  for (const auto& load : loads) load.validate(per_day);

  SimulationResult result;
  result.config = config;
  result.building = effective_building(building, config);
  result.building.validate();
  result.comfort = comfort;
  result.x0 = config.initial_state.value_or(default_initial_state(config.heater));
  const double dt_hours = scenario.dt / 3600.0;

  result.states.reserve(n);
  result.controls.reserve(n);
  StateVector x = result.x0;
  std::vector<double> carry;  // load power of committed cycles running past the block
  const auto clock_start = std::chrono::steady_clock::now();

  for (std::size_t begin = 0, block = 0; begin < n; begin += config.commit_len, ++block) {
    const std::size_t end = std::min(n, begin + config.commit_len + config.lookahead_len);
    const std::size_t horizon = end - begin;
    const std::size_t commit = std::min(config.commit_len, horizon);

    mpc::DayPlan plan;
    try {
      const auto problem = horizon_problem(scenario, result.building, config, comfort, loads, begin, x);
      mpc::SolveOptions options;
      options.formulation = config.formulation;
      plan = mpc::solve_horizon(problem, options);
    } catch (const std::exception& e) {
      throw SimError("day " + std::to_string(block) + " (period " + std::to_string(begin) + "): " + e.what());
    }
    ++result.horizons_solved;
    result.lp_iterations += plan.lp_iterations;

    for (const auto& s : plan.loads) {
      if (s.start >= commit) continue;
      result.starts.push_back({block, s.name, begin + s.start});
    }
    std::vector<double> next_carry;
    for (std::size_t t = 0; t < commit; ++t) {
      double load_power = 0.0;
      for (const auto& s : plan.loads) {
        if (s.start < commit) load_power += s.power[t];
      }
      if (t < carry.size()) load_power += carry[t];
      const double standby = scenario.standby[begin + t];
      const double power = mpc::building_power(plan.controls[t], load_power, standby);
      result.states.push_back(plan.states[t]);
      result.controls.push_back(plan.controls[t]);
      result.slacks.push_back(plan.slacks[t]);
      result.light.push_back(plan.light[t]);
      result.load_power.push_back(load_power);
      result.building_power.push_back(power);
      result.room_lower.push_back(plan.room_bounds.lower[t]);
      result.room_upper.push_back(plan.room_bounds.upper[t]);
      result.electricity_cost += scenario.prices[begin + t] * dt_hours * power;
      const auto& v = plan.slacks[t];
      result.penalty_cost += comfort.rho_temp * (v.room + v.waterheater + v.fridge) + comfort.rho_light * v.light;
    }
    for (std::size_t t = commit; t < horizon; ++t) {
      double spill = 0.0;
      for (const auto& s : plan.loads) {
        if (s.start < commit) spill += s.power[t];
      }
      if (t < carry.size()) spill += carry[t];
      if (spill != 0.0) {
        next_carry.resize(t - commit + 1, 0.0);
        next_carry[t - commit] = spill;
      }
    }
    carry = std::move(next_carry);
    x = plan.states[commit - 1];
  }
  result.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return result;
}

Metrics compute_metrics(const SimulationResult& result, const Scenario& scenario, const MetricsOptions& options) {
  const std::size_t n = result.size();
  if (scenario.size() != n || result.states.size() != n || result.building_power.size() != n) {
    throw SimError("result and scenario are not aligned");
  }
  Metrics m;
  const double dt_hours = scenario.dt / 3600.0;
  if (n == 0) return m;

  const auto [lo_it, hi_it] = std::minmax_element(scenario.prices.begin(), scenario.prices.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const bool price_spread = hi > lo;
  if (!price_spread) m.diagnostics.push_back("constant prices: no low-price periods, shares reported as 0");

  double at = 0.0, near = 0.0, far = 0.0;
  double low_building = 0.0, low_heating = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double power = result.building_power[t];
    const double heating = result.controls[t].hp + result.controls[t].heat;
    m.annual_cost += scenario.prices[t] * dt_hours * power;
    const auto& v = result.slacks[t];
    m.violations_degree_hours += (v.room + v.waterheater + v.fridge) * dt_hours;
    m.building_consumption_kwh += power * dt_hours;
    m.heating_consumption_kwh += heating * dt_hours;

    const double room = result.states[t][State::Room];
    const double eps = options.edge_tolerance;
    auto inside = [&](const mpc::Band& b) { return room >= b.lower - eps && room <= b.upper + eps; };
    if (std::abs(room - options.setpoint) <= options.setpoint_band + eps) at += 1.0;
    else if (inside(options.near_band)) near += 1.0;
    else if (inside(options.far_band)) far += 1.0;

    if (price_spread && (scenario.prices[t] - lo) / (hi - lo) < options.low_price_threshold) {
      low_building += power * dt_hours;
      low_heating += heating * dt_hours;
    }
  }
  m.penalty_cost = result.penalty_cost;
  const double count = static_cast<double>(n);
  m.freq_at_setpoint_pct = 100.0 * at / count;
  m.freq_near_band_pct = 100.0 * near / count;
  m.freq_far_band_pct = 100.0 * far / count;
  if (price_spread) {
    if (m.building_consumption_kwh > 0.0) {
      m.share_building_lowprice_pct = 100.0 * low_building / m.building_consumption_kwh;
    }
    if (m.heating_consumption_kwh > 0.0) {
      m.share_heating_lowprice_pct = 100.0 * low_heating / m.heating_consumption_kwh;
    } else {
      m.diagnostics.push_back("no space-heating consumption: heating share reported as 0");
    }
  }
  return m;
}

GridCell make_cell(HeaterVariant heater, mpc::BoundStrategy strategy, mpc::Flexibility flexibility,
                   double ua_ra_factor) {
  GridCell cell;
  cell.config.heater = heater;
  cell.config.bound_strategy = strategy;
  cell.config.flexibility = flexibility;
  cell.config.ua_ra_factor = ua_ra_factor;
  cell.comfort = mpc::ComfortProfile::preset(flexibility, strategy);
  return cell;
}

std::vector<GridCell> comfort_grid() {
  std::vector<GridCell> cells;
  for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
    for (const auto strategy : {mpc::BoundStrategy::PriceIndependent, mpc::BoundStrategy::PriceDependent}) {
      for (const auto flex : {mpc::Flexibility::NoFlex, mpc::Flexibility::Flex, mpc::Flexibility::ExtraFlex}) {
        cells.push_back(make_cell(heater, strategy, flex));
      }
    }
  }
  return cells;
}

std::vector<GridCell> ua_sweep_grid(HeaterVariant heater) {
  std::vector<GridCell> cells;
  for (const double factor : {0.5, 1.0, 2.0, 4.0}) {
    auto cell = make_cell(heater, mpc::BoundStrategy::PriceIndependent, mpc::Flexibility::Flex, factor);
    cell.config.lighting_enabled = false;
    cell.window_area = 0.0;
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<GridRow> run_case_grid(const Scenario& scenario, const BuildingSpec& building,
                                   const std::vector<GridCell>& cells, const std::vector<DailyLoad>& loads,
                                   unsigned threads, const MetricsOptions& metrics) {
  std::vector<GridRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& row = rows[i];
      row.cell = cells[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        BuildingSpec spec = building;
        if (row.cell.window_area) spec.window_area = *row.cell.window_area;
        const auto result = run_receding_horizon(scenario, spec, row.cell.config, row.cell.comfort, loads);
        row.metrics = compute_metrics(result, scenario, metrics);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace hems::sim
