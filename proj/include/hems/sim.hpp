#pragma once

// Receding-horizon simulation over a scenario, the summary metrics of a run
// and case grids over heater, bound strategy, flexibility and UA factor.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hems/model_core.hpp"
#include "hems/mpc.hpp"

namespace hems::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-period exogenous series. Timestamps are Unix seconds (UTC) of the
/// period start.
struct Scenario {
  double dt = 900.0;  // s
  std::vector<std::int64_t> timestamps;
  std::vector<double> prices;      // EUR/kWh
  std::vector<double> ambient;     // degC
  std::vector<double> irradiance;  // W/m2
  std::vector<double> occupancy;
  std::vector<double> hot_water;   // litres per period
  std::vector<double> standby;     // kW

  std::size_t size() const { return prices.size(); }
  std::size_t periods_per_day() const;
  /// Period-of-day index of period 0.
  std::size_t first_period_offset() const;
  void validate() const;

  /// Disturbances of periods [begin, end), with the window illuminance
  /// derived from irradiance using the building's window and efficacy.
  std::vector<DisturbanceVector> disturbances(const BuildingSpec& building, std::size_t begin,
                                              std::size_t end) const;
  Scenario slice(std::size_t begin, std::size_t end) const;
};

/// Parameters of the built-in deterministic scenario.
struct SyntheticOptions {
  std::uint64_t seed = 7;
  std::size_t days = 7;
  std::size_t first_day_of_year = 0;  // 0 = 1 January 2019
  double dt = 900.0;

  bool operator==(const SyntheticOptions&) const = default;
};

Scenario synthetic_scenario(const SyntheticOptions& options = {});

/// One cycle per day inside the clock window [begin, end) given in periods
/// of the day; end may equal periods_per_day (midnight).
struct DailyLoad {
  std::string name;
  std::vector<double> phases_kw;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;

  void validate(std::size_t periods_per_day) const;
};

/// Washing machine, dishwasher (two windows), tumble dryer and oven with
/// placeholder 15-minute phase profiles.
std::vector<DailyLoad> default_daily_loads(double dt = 900.0);

struct SimulationConfig {
  HeaterVariant heater = HeaterVariant::FloorHeating;
  mpc::Flexibility flexibility = mpc::Flexibility::NoFlex;
  mpc::BoundStrategy bound_strategy = mpc::BoundStrategy::PriceIndependent;
  std::size_t commit_len = 96;
  std::size_t lookahead_len = 96;
  double ua_ra_factor = 1.0;
  bool lighting_enabled = true;
  std::optional<StateVector> initial_state;
  mpc::Formulation formulation = mpc::Formulation::Sparse;

  void validate() const;
  bool operator==(const SimulationConfig&) const = default;
};

/// Room 20, floor 20, pipe water 20, fridge 4.5, water heater 55 degC.
StateVector default_initial_state(HeaterVariant variant);

struct CommittedStart {
  std::size_t day = 0;
  std::string name;
  std::size_t period = 0;  // scenario index of the first phase
};

/// Concatenated committed trajectory; states[t] is the state at the end of
/// period t.
struct SimulationResult {
  SimulationConfig config;
  BuildingSpec building;
  mpc::ComfortProfile comfort;
  StateVector x0;
  std::vector<StateVector> states;
  std::vector<ControlVector> controls;
  std::vector<mpc::Slacks> slacks;
  std::vector<double> light;
  std::vector<double> load_power;
  std::vector<double> building_power;
  std::vector<double> room_lower;
  std::vector<double> room_upper;
  std::vector<CommittedStart> starts;
  double electricity_cost = 0.0;
  double penalty_cost = 0.0;
  std::size_t horizons_solved = 0;
  long long lp_iterations = 0;
  double solve_seconds = 0.0;

  std::size_t size() const { return controls.size(); }
};

/// Building with ua_room_ambient scaled by the config's factor.
BuildingSpec effective_building(const BuildingSpec& building, const SimulationConfig& config);

/// Horizon starting at period `begin`: commit_len + lookahead_len periods
/// truncated at the end of the scenario, with one cycle per load and
/// calendar day whose window lies fully inside. `building` is used as given.
mpc::HorizonProblem horizon_problem(const Scenario& scenario, const BuildingSpec& building,
                                    const SimulationConfig& config, const mpc::ComfortProfile& comfort,
                                    const std::vector<DailyLoad>& loads, std::size_t begin, const StateVector& x0);

SimulationResult run_receding_horizon(const Scenario& scenario, const BuildingSpec& building,
                                      const SimulationConfig& config, const mpc::ComfortProfile& comfort,
                                      const std::vector<DailyLoad>& loads);

struct MetricsOptions {
  double low_price_threshold = 0.5;
  double setpoint = 20.0;
  double setpoint_band = 0.05;
  mpc::Band near_band{18.0, 22.0};
  mpc::Band far_band{15.0, 25.0};
  double edge_tolerance = 1e-6;  // states on a bin edge up to round-off count inside
};

struct Metrics {
  double annual_cost = 0.0;               // EUR, penalties excluded
  double penalty_cost = 0.0;              // EUR
  double violations_degree_hours = 0.0;   // degC h
  double freq_at_setpoint_pct = 0.0;
  double freq_near_band_pct = 0.0;
  double freq_far_band_pct = 0.0;
  double building_consumption_kwh = 0.0;
  double heating_consumption_kwh = 0.0;
  double share_building_lowprice_pct = 0.0;
  double share_heating_lowprice_pct = 0.0;
  std::vector<std::string> diagnostics;
};

/// Low-price periods are normalized over the whole scenario.
Metrics compute_metrics(const SimulationResult& result, const Scenario& scenario,
                        const MetricsOptions& options = {});

struct GridCell {
  SimulationConfig config;
  mpc::ComfortProfile comfort;
  std::optional<double> window_area;  // replaces the building's window when set
};

/// A cell as its preset would build it.
GridCell make_cell(HeaterVariant heater, mpc::BoundStrategy strategy, mpc::Flexibility flexibility,
                   double ua_ra_factor = 1.0);

struct GridRow {
  GridCell cell;
  std::optional<Metrics> metrics;
  std::string error;
  double seconds = 0.0;
};

/// 2 heaters x 2 strategies x 3 flexibility cases, heater-major.
std::vector<GridCell> comfort_grid();
/// Insulation study: UA factor {0.5, 1, 2, 4} for the given heater, Flex,
/// PI-CB, no window and no lighting.
std::vector<GridCell> ua_sweep_grid(HeaterVariant heater);

/// Runs every cell (on up to `threads` workers); the output order follows
/// the input. A failing cell records its error and the others still run.
std::vector<GridRow> run_case_grid(const Scenario& scenario, const BuildingSpec& building,
                                   const std::vector<GridCell>& cells, const std::vector<DailyLoad>& loads,
                                   unsigned threads = 1, const MetricsOptions& metrics = {});

}  // namespace hems::sim
