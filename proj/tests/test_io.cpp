#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hems/io.hpp"

using namespace hems;
using namespace hems::io;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("hems_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// One day of 15-minute rows starting 2019-01-01 00:00 UTC.
TimeSeries day_series(double value) {
  TimeSeries s;
  for (int t = 0; t < 96; ++t) {
    s.timestamps.push_back(1546300800 + t * 900);
    s.values.push_back(value + 0.001 * t);
  }
  return s;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ClockRange, ParsesRightExclusiveWindows) {
  EXPECT_EQ(parse_clock_range("06:00-14:00"), std::make_pair(360, 840));
  EXPECT_EQ(parse_clock_range("16:00-00:00"), std::make_pair(960, 1440));
  EXPECT_EQ(parse_clock_range("16:00-24:00"), std::make_pair(960, 1440));
  EXPECT_THROW(parse_clock_range("22:00-02:00"), ConfigError);
  EXPECT_THROW(parse_clock_range("6:00-14:00"), ConfigError);
  EXPECT_THROW(parse_clock_range("06:00-06:00"), ConfigError);
  EXPECT_EQ(format_clock_range(960, 1440), "16:00-24:00");
}

TEST(ClockRange, ConvertsToPeriodsOfDay) {
  const LoadEntry e{"wm", {1.0, 0.5}, 360, 840};
  const auto load = e.to_daily_load(900.0);
  EXPECT_EQ(load.window_begin, 24u);
  EXPECT_EQ(load.window_end, 56u);
  const LoadEntry off_grid{"wm", {1.0}, 390, 840};
  EXPECT_THROW(off_grid.to_daily_load(3600.0), ConfigError);
}

TEST(Config, DefaultDocumentRoundTrips) {
  const ConfigDocument doc;
  const auto text = serialize_config(doc);
  const auto again = parse_config(text);
  EXPECT_EQ(again, doc);
  EXPECT_EQ(serialize_config(again), text);
}

TEST(Config, CustomDocumentRoundTrips) {
  TempDir dir;
  write_time_series(dir / "price.csv", day_series(0.1));
  write_time_series(dir / "ambient.csv", day_series(5.0));
  const std::string text = R"({
    "building": {"variant": "HVAC", "ua_room_ambient": 75.5, "window_area": 2.0},
    "comfort": {"preset": "extraflex", "bound_strategy": "PD-CB", "alpha": 4.5, "rf_bounds": [3.5, 6.0]},
    "loads": [{"name": "kettle", "phases_kw": [2.0, 0.1], "window": "06:00-09:30"}],
    "simulation": {"dt_s": 900, "commit_len": 96, "lookahead_len": 48, "ua_ra_factor": 2,
                   "lighting_enabled": false, "formulation": "condensed",
                   "initial_state": {"room": 19.5, "fridge": 4.0, "waterheater": 55.0}},
    "scenario": {"files": {"price": "price.csv", "ambient": "ambient.csv"}}
  })";
  const auto doc = parse_config(text, dir.path());
  EXPECT_EQ(doc.simulation.heater, HeaterVariant::Hvac);
  EXPECT_EQ(doc.simulation.flexibility, mpc::Flexibility::ExtraFlex);
  EXPECT_EQ(doc.simulation.bound_strategy, mpc::BoundStrategy::PriceDependent);
  EXPECT_EQ(doc.comfort.alpha, 4.5);
  EXPECT_EQ(doc.comfort.wh_bounds, (mpc::Band{45.0, 65.0}));
  EXPECT_EQ(doc.building.ua_room_ambient, 75.5);
  ASSERT_TRUE(doc.loads);
  EXPECT_EQ(doc.daily_loads()[0].window_end, 38u);
  ASSERT_TRUE(doc.files);
  EXPECT_EQ(doc.files->price, dir / "price.csv");

  const auto again = parse_config(serialize_config(doc), dir.path());
  EXPECT_EQ(again, doc);
  EXPECT_EQ(scenario_for(doc).size(), 96u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_NE(error_of([] { parse_config(R"({"building": {"ua_room_ambiant": 50}})"); })
                .find("config.building.ua_room_ambiant: unknown key"),
            std::string::npos);
  EXPECT_THROW(parse_config(R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"building": {"cap_room": "big"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"building": {"cap_room": -1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"comfort": {"preset": "superflex"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"simulation": {"dt_s": 700}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"simulation": {"commit_len": -4}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"loads": [{"name": "x", "phases_kw": [1], "window": "22:00-02:00"}]})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": {"files": {"price": "missing.csv", "ambient": "missing.csv"}}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario": {"synthetic": {}, "files": {}}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  // The floor state is not part of the HVAC model.
  EXPECT_THROW(parse_config(R"({"building": {"variant": "HVAC"}, "simulation": {"initial_state":
                 {"room": 20, "floor": 20, "fridge": 4, "waterheater": 55}}})"),
               ConfigError);
}

TEST(Config, EmptyLoadListMeansNoLoads) {
  const auto doc = parse_config(R"({"loads": []})");
  EXPECT_TRUE(doc.daily_loads().empty());
  EXPECT_EQ(parse_config("{}").daily_loads().size(), 5u);
}

TEST(Timestamps, Iso8601) {
  EXPECT_EQ(parse_iso8601("2019-01-01T00:15:00Z"), 1546301700);
  EXPECT_EQ(parse_iso8601("2019-01-01T00:15"), 1546301700);
  EXPECT_EQ(parse_iso8601("2019-01-01 01:15:00+01:00"), 1546301700);
  EXPECT_FALSE(parse_iso8601("2019-02-30T00:00:00Z"));
  EXPECT_FALSE(parse_iso8601("2019-01-01T25:00:00Z"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
  EXPECT_EQ(format_iso8601(1546301700), "2019-01-01T00:15:00Z");
  EXPECT_EQ(parse_iso8601(format_iso8601(1577836799)), 1577836799);
}

TEST(TimeSeriesFiles, DayOfRowsLoads) {
  TempDir dir;
  write_time_series(dir / "price.csv", day_series(0.1));
  write_time_series(dir / "ambient.csv", day_series(5.0));
  const auto scenario = load_scenario({dir / "price.csv", dir / "ambient.csv", {}, {}, {}, {}}, 900.0);
  EXPECT_EQ(scenario.size(), 96u);
  EXPECT_EQ(scenario.prices[95], 0.1 + 0.001 * 95);
  EXPECT_EQ(scenario.occupancy[10], 0.0);
}

TEST(TimeSeriesFiles, SemicolonDelimiter) {
  TempDir dir;
  write_text(dir / "p.csv", "timestamp;value\n2019-01-01T00:00:00Z;0.1\n2019-01-01T00:15:00Z;0.2\n");
  const auto s = read_time_series(dir / "p.csv");
  EXPECT_EQ(s.values, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(s.lines, (std::vector<std::size_t>{2, 3}));
}

TEST(TimeSeriesFiles, ErrorsNameFileLineAndColumn) {
  TempDir dir;
  const auto p = dir / "p.csv";
  write_text(p, "timestamp,value\n2019-01-01T00:00:00Z,0.1\n2019-01-01T00:15:00Z,0.2\n2019-01-01T00:15:00Z,0.3\n");
  auto msg = error_of([&] { read_time_series(p); });
  EXPECT_NE(msg.find(p.string() + ":4:1: duplicate timestamp"), std::string::npos) << msg;

  write_text(p, "timestamp,value\n2019-01-01T00:00:00Z,abc\n");
  msg = error_of([&] { read_time_series(p); });
  EXPECT_NE(msg.find(p.string() + ":2:22: invalid number 'abc'"), std::string::npos) << msg;

  write_text(p, "timestamp,value\n2019-01-01T00:00:00Z,0.1\n2019-01-01T00:45:00Z,0.2\n");
  msg = error_of([&] { load_scenario({p, p, {}, {}, {}, {}}, 900.0); });
  EXPECT_NE(msg.find(p.string() + ":3:1: gap"), std::string::npos) << msg;

  write_text(p, "timestamp,value\n2019-01-01T00:15:00Z,0.1\n2019-01-01T00:00:00Z,0.2\n");
  EXPECT_THROW(read_time_series(p), DataError);
  write_text(p, "timestamp,value\n");
  EXPECT_THROW(read_time_series(p), DataError);
  EXPECT_THROW(read_time_series(dir / "absent.csv"), DataError);
}

TEST(TimeSeriesFiles, MisalignedSignalIsRejected) {
  TempDir dir;
  write_time_series(dir / "price.csv", day_series(0.1));
  auto shifted = day_series(5.0);
  for (auto& t : shifted.timestamps) t += 900;
  write_time_series(dir / "ambient.csv", shifted);
  const auto msg = error_of([&] { load_scenario({dir / "price.csv", dir / "ambient.csv", {}, {}, {}, {}}, 900.0); });
  EXPECT_NE(msg.find("ambient.csv:2:1: timestamp does not match"), std::string::npos) << msg;
  auto shorter = day_series(5.0);
  shorter.timestamps.pop_back();
  shorter.values.pop_back();
  write_time_series(dir / "ambient.csv", shorter);
  EXPECT_THROW(load_scenario({dir / "price.csv", dir / "ambient.csv", {}, {}, {}, {}}, 900.0), DataError);
}

TEST(TimeSeriesFiles, IrradianceBecomesWindowIlluminance) {
  TempDir dir;
  write_time_series(dir / "price.csv", day_series(0.1));
  write_time_series(dir / "ambient.csv", day_series(5.0));
  auto irr = day_series(0.0);
  for (auto& v : irr.values) v = 100.0;
  write_time_series(dir / "irr.csv", irr);
  const auto scenario = load_scenario({dir / "price.csv", dir / "ambient.csv", dir / "irr.csv", {}, {}, {}}, 900.0);
  BuildingSpec building;
  building.window_area = 1.0;
  EXPECT_DOUBLE_EQ(scenario.disturbances(building, 0, 1)[0].solar_illuminance, 10500.0);
}

TEST(Results, EmptyGridWritesHeaderOnly) {
  TempDir dir;
  write_metrics(dir.path(), {});
  const auto csv = read_text(dir / "metrics.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("type,comfort_bounds,case,ua_factor,annual_cost_eur", 0), 0u);
  EXPECT_EQ(read_text(dir / "metrics.json"), "[]\n");
}

TEST(Results, GridRowsFollowColumnOrder) {
  TempDir dir;
  std::vector<sim::GridRow> rows;
  for (const auto& cell : sim::comfort_grid()) {
    sim::GridRow row;
    row.cell = cell;
    row.metrics = sim::Metrics{};
    row.metrics->annual_cost = 1.0 / 3.0;
    rows.push_back(row);
  }
  rows[4].metrics.reset();
  rows[4].error = "day 0 (period 0): infeasible, \"odd\"";
  write_metrics(dir.path(), rows);
  std::ifstream in(dir / "metrics.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 13u);
  EXPECT_EQ(lines[1].rfind("FH,PI-CB,noflex,1,0.3333333333333333,", 0), 0u);
  EXPECT_EQ(lines[12].rfind("HVAC,PD-CB,extraflex,1,", 0), 0u);
  EXPECT_NE(lines[5].find("\"day 0 (period 0): infeasible, \"\"odd\"\"\""), std::string::npos);
  for (const auto& l : lines) {
    if (l.find('"') == std::string::npos) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 13) << l;
  }
}

TEST(Results, TrajectoryRoundTripReplays) {
  TempDir dir;
  sim::SyntheticOptions opts;
  opts.days = 2;
  const auto scenario = sim::synthetic_scenario(opts);
  for (const auto heater : {HeaterVariant::FloorHeating, HeaterVariant::Hvac}) {
    const auto cell = sim::make_cell(heater, mpc::BoundStrategy::PriceIndependent, mpc::Flexibility::Flex);
    const auto result = sim::run_receding_horizon(scenario, BuildingSpec{}, cell.config, cell.comfort,
                                                  sim::default_daily_loads());
    write_results(dir.path(), result, sim::compute_metrics(result, scenario), scenario);
    const auto rows = read_trajectory(dir / "trajectory.csv", heater);
    ASSERT_EQ(rows.size(), result.size());

    const auto dist = scenario.disturbances(result.building, 0, scenario.size());
    const auto model = build_discrete_model(result.building, heater, dist, scenario.dt);
    StateVector prev = result.x0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      EXPECT_EQ(rows[t].timestamp, scenario.timestamps[t]);
      EXPECT_EQ(rows[t].control, result.controls[t]);
      const auto next = step(model, t, prev, rows[t].control, dist[t]);
      for (const State s : active_states(heater)) ASSERT_NEAR(next[s], rows[t].state[s], 1e-9);
      EXPECT_EQ(rows[t].building_power, rows[t].control.electrical_kw() + rows[t].load_power + scenario.standby[t]);
      prev = rows[t].state;
    }
    EXPECT_NE(read_text(dir / "metrics.json").find("\"annual_cost_eur\""), std::string::npos);
  }
}

TEST(Results, UnwritableDirectoryNamesThePath) {
  TempDir dir;
  write_text(dir / "file", "x");
  const auto msg = error_of([&] { write_metrics(dir / "file" / "sub", {}); });
  EXPECT_NE(msg.find((dir / "file" / "sub").string()), std::string::npos) << msg;
}
