#pragma once

// Configuration documents, time-series files and result tables.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hems/model_core.hpp"
#include "hems/mpc.hpp"
#include "hems/sim.hpp"

namespace hems::io {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed data file; the message starts with path:line:col.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "HH:MM-HH:MM", right-exclusive; an end of "00:00" or "24:00" means
/// midnight. Returns minutes of the day [begin, end).
std::pair<int, int> parse_clock_range(std::string_view text);
std::string format_clock_range(int begin_minute, int end_minute);

struct LoadEntry {
  std::string name;
  std::vector<double> phases_kw;  // one phase per simulation period
  int window_begin_minute = 0;
  int window_end_minute = 0;

  /// Period-of-day window; both ends must fall on period boundaries.
  sim::DailyLoad to_daily_load(double dt) const;
  bool operator==(const LoadEntry&) const = default;
};

struct ScenarioFiles {
  std::filesystem::path price;       // EUR/kWh
  std::filesystem::path ambient;     // degC
  std::optional<std::filesystem::path> irradiance;  // W/m2
  std::optional<std::filesystem::path> occupancy;
  std::optional<std::filesystem::path> hot_water;   // litres per period
  std::optional<std::filesystem::path> standby;     // kW

  bool operator==(const ScenarioFiles&) const = default;
};

struct ConfigDocument {
  BuildingSpec building;
  mpc::ComfortProfile comfort = mpc::ComfortProfile::preset(mpc::Flexibility::NoFlex,
                                                           mpc::BoundStrategy::PriceIndependent);
  /// Unset selects the built-in appliances.
  std::optional<std::vector<LoadEntry>> loads;
  double dt = 900.0;  // s
  /// Also carries the heater variant, flexibility case and bound strategy.
  sim::SimulationConfig simulation;
  /// Files when set, otherwise the synthetic generator.
  std::optional<ScenarioFiles> files;
  sim::SyntheticOptions synthetic;

  std::vector<sim::DailyLoad> daily_loads() const;
  bool operator==(const ConfigDocument&) const = default;
};

/// Parses JSON text. Unknown keys and wrong types are errors; relative file
/// paths resolve against `base_dir` and must exist.
ConfigDocument parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ConfigDocument load_config(const std::filesystem::path& path);
/// Every field written out, so parsing the result reproduces `doc`.
std::string serialize_config(const ConfigDocument& doc);

/// Unix seconds from an ISO-8601 date-time ("2019-01-01T00:15:00Z",
/// optional seconds, optional "Z" or +hh:mm offset; no zone means UTC).
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t unix_seconds);

struct TimeSeries {
  std::vector<std::int64_t> timestamps;
  std::vector<double> values;
  std::vector<std::size_t> lines;  // source line of each row, when read from a file
};

/// Header row then "timestamp,value" rows (',' or ';'). Timestamps must
/// increase strictly.
TimeSeries read_time_series(const std::filesystem::path& path);
void write_time_series(const std::filesystem::path& path, const TimeSeries& series);

/// Reads and aligns every signal; all files must share the timestamps of the
/// price file, spaced by dt. Missing optional signals are zero.
sim::Scenario load_scenario(const ScenarioFiles& files, double dt);
/// The scenario selected by the document.
sim::Scenario scenario_for(const ConfigDocument& doc);

/// Columns of the metrics table, in output order.
const std::vector<std::string>& metrics_columns();

struct TrajectoryRow {
  std::int64_t timestamp = 0;
  StateVector state;
  ControlVector control;
  mpc::Slacks slacks;
  double light = 0.0;
  double load_power = 0.0;
  double building_power = 0.0;
  double price = 0.0;
};

/// trajectory.csv: one row per committed period.
void write_trajectory(const std::filesystem::path& path, const sim::SimulationResult& result,
                      const sim::Scenario& scenario);
std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& path, HeaterVariant variant);

/// metrics.csv and metrics.json for grid rows (an empty grid gives a
/// header-only table).
void write_metrics(const std::filesystem::path& out_dir, const std::vector<sim::GridRow>& rows);

/// trajectory.csv, metrics.csv and metrics.json for one run.
void write_results(const std::filesystem::path& out_dir, const sim::SimulationResult& result,
                   const sim::Metrics& metrics, const sim::Scenario& scenario);

}  // namespace hems::io
