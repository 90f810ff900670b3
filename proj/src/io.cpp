#include "hems/io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hems/format.hpp"

namespace hems::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct BuildingField {
  const char* key;
  double BuildingSpec::*member;
};

// Units: UA in W/degC, capacities in J/degC, powers in kW, areas in m2.
constexpr BuildingField kBuildingFields[] = {
    {"ua_room_ambient", &BuildingSpec::ua_room_ambient},
    {"ua_floor_room", &BuildingSpec::ua_floor_room},
    {"ua_water_floor", &BuildingSpec::ua_water_floor},
    {"ua_room_fridge", &BuildingSpec::ua_room_fridge},
    {"ua_waterheater_ambient", &BuildingSpec::ua_waterheater_ambient},
    {"cap_room", &BuildingSpec::cap_room},
    {"cap_floor", &BuildingSpec::cap_floor},
    {"cap_pipewater", &BuildingSpec::cap_pipewater},
    {"cap_fridge", &BuildingSpec::cap_fridge},
    {"cap_waterheater", &BuildingSpec::cap_waterheater},
    {"cop_hp", &BuildingSpec::cop_hp},
    {"cop_heat", &BuildingSpec::cop_heat},
    {"cop_cool", &BuildingSpec::cop_cool},
    {"cop_fridge", &BuildingSpec::cop_fridge},
    {"cop_waterheater", &BuildingSpec::cop_waterheater},
    {"pmax_hp", &BuildingSpec::pmax_hp},
    {"pmax_heat", &BuildingSpec::pmax_heat},
    {"pmax_cool", &BuildingSpec::pmax_cool},
    {"pmax_wh", &BuildingSpec::pmax_wh},
    {"pmax_rf", &BuildingSpec::pmax_rf},
    {"pmax_al", &BuildingSpec::pmax_al},
    {"floor_area", &BuildingSpec::floor_area},
    {"window_area", &BuildingSpec::window_area},
    {"solar_transmittance_split", &BuildingSpec::solar_transmittance_split},
    {"internal_gain_per_occupancy", &BuildingSpec::internal_gain_per_occupancy},
    {"water_specific_heat", &BuildingSpec::water_specific_heat},
    {"inlet_water_temp", &BuildingSpec::inlet_water_temp},
    {"lum_efficacy_indoor", &BuildingSpec::lum_efficacy_indoor},
    {"lum_efficacy_daylight", &BuildingSpec::lum_efficacy_daylight},
};

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const Json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what, const std::string& key = {}) const {
    throw ConfigError((key.empty() ? path_ : path_ + "." + key) + ": " + what);
  }

  const Json* find(const std::string& key) {
    const auto it = value_.find(key);
    if (it == value_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) fail("expected a number", key);
      out = v->get<double>();
      if (!std::isfinite(out)) fail("must be finite", key);
    }
  }

  template <typename T>
  void count(const std::string& key, T& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) fail("expected a non-negative integer", key);
      out = v->get<T>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) fail("expected true or false", key);
      out = v->get<bool>();
    }
  }

  std::optional<std::string> text(const std::string& key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail("expected a string", key);
    return v->get<std::string>();
  }

  void band(const std::string& key, mpc::Band& out) {
    if (const Json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        fail("expected [lower, upper]", key);
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  std::optional<Section> child(const std::string& key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    return Section(*v, path_ + "." + key);
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [key, _] : value_.items()) {
      if (!seen_.count(key)) fail("unknown key", key);
    }
  }

 private:
  const Json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
auto rethrow_as_config(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string_view to_string(mpc::Formulation f) {
  return f == mpc::Formulation::Sparse ? "sparse" : "condensed";
}

mpc::Formulation parse_formulation(std::string_view text) {
  if (text == "sparse") return mpc::Formulation::Sparse;
  if (text == "condensed") return mpc::Formulation::Condensed;
  throw ConfigError("unknown formulation '" + std::string(text) + "'");
}

fs::path resolve_existing(const std::string& text, const fs::path& base, const std::string& where) {
  fs::path p(text);
  if (p.is_relative()) p = base / p;
  p = p.lexically_normal();
  if (!fs::exists(p)) throw ConfigError(where + ": file not found: " + p.string());
  return p;
}

void parse_building(Section s, ConfigDocument& doc) {
  if (auto v = s.text("variant")) {
    doc.simulation.heater = rethrow_as_config(s.path() + ".variant", [&] { return parse_heater_variant(*v); });
  }
  for (const auto& f : kBuildingFields) s.number(f.key, doc.building.*f.member);
  s.finish();
  rethrow_as_config(s.path(), [&] { doc.building.validate(); });
}

void parse_comfort(Section s, ConfigDocument& doc) {
  auto flex = mpc::Flexibility::NoFlex;
  auto strategy = mpc::BoundStrategy::PriceIndependent;
  if (auto v = s.text("preset")) flex = rethrow_as_config(s.path() + ".preset", [&] { return mpc::parse_flexibility(*v); });
  if (auto v = s.text("bound_strategy")) {
    strategy = rethrow_as_config(s.path() + ".bound_strategy", [&] { return mpc::parse_bound_strategy(*v); });
  }
  auto& c = doc.comfort;
  c = mpc::ComfortProfile::preset(flex, strategy);
  s.number("room_setpoint", c.room_setpoint);
  s.number("alpha", c.alpha);
  s.band("wh_bounds", c.wh_bounds);
  s.band("rf_bounds", c.rf_bounds);
  s.band("light_bounds_lux", c.light_bounds_lux);
  s.number("blind_min", c.blind_min);
  s.number("rho_temp", c.rho_temp);
  s.number("rho_light", c.rho_light);
  s.finish();
  rethrow_as_config(s.path(), [&] { c.validate(); });
  doc.simulation.flexibility = flex;
  doc.simulation.bound_strategy = strategy;
}

void parse_loads(const Json& value, ConfigDocument& doc) {
  if (!value.is_array()) throw ConfigError("loads: expected an array");
  std::vector<LoadEntry> loads;
  for (std::size_t i = 0; i < value.size(); ++i) {
    Section s(value[i], "loads[" + std::to_string(i) + "]");
    LoadEntry e;
    e.name = s.text("name").value_or("");
    if (e.name.empty()) s.fail("missing name");
    const Json* phases = s.find("phases_kw");
    if (!phases || !phases->is_array() || phases->empty()) s.fail("phases_kw must be a non-empty array of numbers");
    for (const auto& p : *phases) {
      if (!p.is_number()) s.fail("phases_kw must be a non-empty array of numbers");
      e.phases_kw.push_back(p.get<double>());
    }
    const auto window = s.text("window");
    if (!window) s.fail("missing window");
    std::tie(e.window_begin_minute, e.window_end_minute) =
        rethrow_as_config(s.path() + ".window", [&] { return parse_clock_range(*window); });
    s.finish();
    loads.push_back(std::move(e));
  }
  doc.loads = std::move(loads);
}

void parse_simulation(Section s, ConfigDocument& doc) {
  auto& sim = doc.simulation;
  s.number("dt_s", doc.dt);
  s.count("commit_len", sim.commit_len);
  s.count("lookahead_len", sim.lookahead_len);
  s.number("ua_ra_factor", sim.ua_ra_factor);
  s.flag("lighting_enabled", sim.lighting_enabled);
  if (auto v = s.text("formulation")) {
    sim.formulation = rethrow_as_config(s.path() + ".formulation", [&] { return parse_formulation(*v); });
  }
  if (auto init = s.child("initial_state")) {
    StateVector x;
    for (const State st : active_states(sim.heater)) {
      double value = std::nan("");
      init->number(std::string(to_string(st)), value);
      if (std::isnan(value)) init->fail("missing temperature", std::string(to_string(st)));
      x.set(st, value);
    }
    init->finish();
    sim.initial_state = x;
  }
  s.finish();
  if (!(doc.dt > 0.0)) s.fail("must be positive", "dt_s");
  rethrow_as_config(s.path(), [&] { sim.validate(); });
}

void parse_scenario(Section s, ConfigDocument& doc, const fs::path& base) {
  auto synthetic = s.child("synthetic");
  auto files = s.child("files");
  if (synthetic && files) s.fail("give either synthetic or files, not both");
  if (synthetic) {
    synthetic->count("seed", doc.synthetic.seed);
    synthetic->count("days", doc.synthetic.days);
    synthetic->count("first_day_of_year", doc.synthetic.first_day_of_year);
    synthetic->finish();
    if (doc.synthetic.days == 0) synthetic->fail("must be positive", "days");
  }
  if (files) {
    ScenarioFiles f;
    auto required = [&](const char* key) {
      const auto v = files->text(key);
      if (!v) files->fail("missing file", key);
      return resolve_existing(*v, base, files->path() + "." + key);
    };
    auto optional = [&](const char* key) -> std::optional<fs::path> {
      const auto v = files->text(key);
      if (!v) return std::nullopt;
      return resolve_existing(*v, base, files->path() + "." + key);
    };
    f.price = required("price");
    f.ambient = required("ambient");
    f.irradiance = optional("irradiance");
    f.occupancy = optional("occupancy");
    f.hot_water = optional("hot_water");
    f.standby = optional("standby");
    files->finish();
    doc.files = std::move(f);
  }
  s.finish();
}

Json band_json(const mpc::Band& b) { return Json::array({b.lower, b.upper}); }

std::string cell_error(const std::string& path, std::size_t line, std::size_t col, const std::string& what) {
  return path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw DataError(path.string() + ": write failed");
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> cells;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(delim, begin);
    cells.emplace_back(line.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return cells;
}

}  // namespace

std::pair<int, int> parse_clock_range(std::string_view text) {
  auto clock = [&](std::string_view t) {
    if (t.size() != 5 || t[2] != ':') throw ConfigError("expected HH:MM-HH:MM, got '" + std::string(text) + "'");
    for (const std::size_t i : {0u, 1u, 3u, 4u}) {
      if (t[i] < '0' || t[i] > '9') throw ConfigError("expected HH:MM-HH:MM, got '" + std::string(text) + "'");
    }
    const int h = (t[0] - '0') * 10 + (t[1] - '0');
    const int m = (t[3] - '0') * 10 + (t[4] - '0');
    if (h > 24 || m > 59 || (h == 24 && m != 0)) throw ConfigError("invalid clock time '" + std::string(t) + "'");
    return h * 60 + m;
  };
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) throw ConfigError("expected HH:MM-HH:MM, got '" + std::string(text) + "'");
  const int begin = clock(text.substr(0, dash));
  int end = clock(text.substr(dash + 1));
  if (begin == 1440) throw ConfigError("window cannot start at 24:00");
  if (end == 0) end = 1440;
  if (end <= begin) throw ConfigError("window '" + std::string(text) + "' wraps past midnight");
  return {begin, end};
}

std::string format_clock_range(int begin_minute, int end_minute) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", begin_minute / 60, begin_minute % 60, end_minute / 60,
                end_minute % 60);
  return buf;
}

sim::DailyLoad LoadEntry::to_daily_load(double dt) const {
  const double per = dt / 60.0;
  const double b = window_begin_minute / per;
  const double e = window_end_minute / per;
  if (b != std::floor(b) || e != std::floor(e)) {
    throw ConfigError("load '" + name + "': window " + format_clock_range(window_begin_minute, window_end_minute) +
                      " does not fall on period boundaries");
  }
  sim::DailyLoad load{name, phases_kw, static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
  rethrow_as_config("load '" + name + "'", [&] { load.validate(static_cast<std::size_t>(86400.0 / dt)); });
  return load;
}

std::vector<sim::DailyLoad> ConfigDocument::daily_loads() const {
  if (!loads) return sim::default_daily_loads(dt);
  std::vector<sim::DailyLoad> out;
  for (const auto& e : *loads) out.push_back(e.to_daily_load(dt));
  return out;
}

ConfigDocument parse_config(std::string_view text, const fs::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ConfigDocument doc;
  Section s(root, "config");
  // The heater lives in the building section but the initial state depends
  // on it, so sections are read in dependency order.
  if (auto b = s.child("building")) parse_building(*b, doc);
  if (auto c = s.child("comfort")) parse_comfort(*c, doc);
  if (const Json* l = s.find("loads")) parse_loads(*l, doc);
  if (auto m = s.child("simulation")) parse_simulation(*m, doc);
  if (auto sc = s.child("scenario")) parse_scenario(*sc, doc, base_dir);
  s.finish();
  if (std::fmod(86400.0, doc.dt) != 0.0) throw ConfigError("config.simulation.dt_s: must divide one day");
  doc.daily_loads();  // window and phase checks against dt
  return doc;
}

ConfigDocument load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  try {
    return parse_config(buf.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ConfigDocument& doc) {
  Json root = Json::object();
  Json building = Json::object();
  building["variant"] = std::string(to_string(doc.simulation.heater));
  for (const auto& f : kBuildingFields) building[f.key] = doc.building.*f.member;
  root["building"] = std::move(building);

  const auto& c = doc.comfort;
  root["comfort"] = {{"preset", std::string(mpc::to_string(doc.simulation.flexibility))},
                     {"bound_strategy", std::string(mpc::to_string(doc.simulation.bound_strategy))},
                     {"room_setpoint", c.room_setpoint},
                     {"alpha", c.alpha},
                     {"wh_bounds", band_json(c.wh_bounds)},
                     {"rf_bounds", band_json(c.rf_bounds)},
                     {"light_bounds_lux", band_json(c.light_bounds_lux)},
                     {"blind_min", c.blind_min},
                     {"rho_temp", c.rho_temp},
                     {"rho_light", c.rho_light}};

  if (doc.loads) {
    Json loads = Json::array();
    for (const auto& e : *doc.loads) {
      loads.push_back({{"name", e.name},
                       {"phases_kw", e.phases_kw},
                       {"window", format_clock_range(e.window_begin_minute, e.window_end_minute)}});
    }
    root["loads"] = std::move(loads);
  }

  const auto& sim = doc.simulation;
  Json simulation = {{"dt_s", doc.dt},
                     {"commit_len", sim.commit_len},
                     {"lookahead_len", sim.lookahead_len},
                     {"ua_ra_factor", sim.ua_ra_factor},
                     {"lighting_enabled", sim.lighting_enabled},
                     {"formulation", std::string(to_string(sim.formulation))}};
  if (sim.initial_state) {
    Json init = Json::object();
    for (const State st : active_states(sim.heater)) init[std::string(to_string(st))] = (*sim.initial_state)[st];
    simulation["initial_state"] = std::move(init);
  }
  root["simulation"] = std::move(simulation);

  if (doc.files) {
    const auto& f = *doc.files;
    Json files = {{"price", f.price.string()}, {"ambient", f.ambient.string()}};
    if (f.irradiance) files["irradiance"] = f.irradiance->string();
    if (f.occupancy) files["occupancy"] = f.occupancy->string();
    if (f.hot_water) files["hot_water"] = f.hot_water->string();
    if (f.standby) files["standby"] = f.standby->string();
    root["scenario"] = {{"files", std::move(files)}};
  } else {
    root["scenario"] = {{"synthetic",
                         {{"seed", doc.synthetic.seed},
                          {"days", doc.synthetic.days},
                          {"first_day_of_year", doc.synthetic.first_day_of_year}}}};
  }
  return root.dump(2) + "\n";
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':') {
    return std::nullopt;
  }
  const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2), h = digits(11, 2), mi = digits(14, 2);
  if (!y || !mo || !d || !h || !mi) return std::nullopt;
  int sec = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    const auto s = digits(pos + 1, 2);
    if (!s) return std::nullopt;
    sec = *s;
    pos += 3;
  }
  int offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z' && pos + 1 == text.size()) {
      pos += 1;
    } else if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
      const auto oh = digits(pos + 1, 2), om = digits(pos + 4, 2);
      if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
      offset_minutes = (*oh * 60 + *om) * (text[pos] == '+' ? 1 : -1);
      pos = text.size();
    } else {
      return std::nullopt;
    }
  }
  if (pos != text.size() || *h > 23 || *mi > 59 || sec > 59) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year(*y), std::chrono::month(static_cast<unsigned>(*mo)),
                                        std::chrono::day(static_cast<unsigned>(*d))};
  if (!ymd.ok()) return std::nullopt;
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + *h * 3600 + *mi * 60 + sec - offset_minutes * 60;
}

std::string format_iso8601(std::int64_t unix_seconds) {
  const auto days = std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds(std::chrono::seconds(unix_seconds)));
  const std::chrono::year_month_day ymd(days);
  const std::int64_t sod = unix_seconds - static_cast<std::int64_t>(days.time_since_epoch().count()) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(sod / 3600),
                static_cast<int>(sod % 3600 / 60), static_cast<int>(sod % 60));
  return buf;
}

TimeSeries read_time_series(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string name = path.string();
  if (!in) throw DataError(name + ": cannot open");
  TimeSeries series;
  std::string line;
  std::size_t line_no = 0;
  char delim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (delim == 0) {
      delim = line.find(';') != std::string::npos && line.find(',') == std::string::npos ? ';' : ',';
      const auto header = split(line, delim);
      if (header.size() != 2) throw DataError(cell_error(name, line_no, 1, "header must have two columns"));
      continue;
    }
    const auto cells = split(line, delim);
    if (cells.size() != 2) {
      throw DataError(cell_error(name, line_no, 1, "expected 2 columns, found " + std::to_string(cells.size())));
    }
    const std::size_t value_col = cells[0].size() + 2;
    const auto ts = parse_iso8601(cells[0]);
    if (!ts) throw DataError(cell_error(name, line_no, 1, "invalid timestamp '" + cells[0] + "'"));
    const auto value = parse_number(cells[1]);
    if (!value || !std::isfinite(*value)) {
      throw DataError(cell_error(name, line_no, value_col, "invalid number '" + cells[1] + "'"));
    }
    if (!series.timestamps.empty()) {
      const auto prev = series.timestamps.back();
      if (*ts == prev) {
        throw DataError(cell_error(name, line_no, 1,
                                   "duplicate timestamp (first seen on line " + std::to_string(series.lines.back()) + ")"));
      }
      if (*ts < prev) throw DataError(cell_error(name, line_no, 1, "timestamp goes backwards"));
    }
    series.timestamps.push_back(*ts);
    series.values.push_back(*value);
    series.lines.push_back(line_no);
  }
  if (delim == 0) throw DataError(name + ":1:1: missing header");
  if (series.values.empty()) throw DataError(name + ": no data rows");
  return series;
}

void write_time_series(const fs::path& path, const TimeSeries& series) {
  auto out = open_output(path);
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << format_iso8601(series.timestamps[i]) << ',' << format_number(series.values[i]) << '\n';
  }
  close_output(out, path);
}

sim::Scenario load_scenario(const ScenarioFiles& files, double dt) {
  const auto price = read_time_series(files.price);
  const auto step = static_cast<std::int64_t>(dt);
  if (static_cast<double>(step) != dt || step <= 0) throw DataError("dt must be a positive whole number of seconds");
  for (std::size_t i = 1; i < price.timestamps.size(); ++i) {
    if (price.timestamps[i] - price.timestamps[i - 1] != step) {
      throw DataError(cell_error(files.price.string(), price.lines[i], 1,
                                 "gap: expected " + format_iso8601(price.timestamps[i - 1] + step)));
    }
  }
  auto aligned = [&](const std::optional<fs::path>& path) {
    std::vector<double> values(price.values.size(), 0.0);
    if (!path) return values;
    const auto series = read_time_series(*path);
    const std::size_t n = std::min(series.values.size(), price.values.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (series.timestamps[i] != price.timestamps[i]) {
        throw DataError(cell_error(path->string(), series.lines[i], 1,
                                   "timestamp does not match " + files.price.string() + " line " +
                                       std::to_string(price.lines[i])));
      }
    }
    if (series.values.size() != price.values.size()) {
      throw DataError(path->string() + ": " + std::to_string(series.values.size()) + " rows but " +
                      files.price.string() + " has " + std::to_string(price.values.size()));
    }
    return series.values;
  };
  sim::Scenario s;
  s.dt = dt;
  s.timestamps = price.timestamps;
  s.prices = price.values;
  s.ambient = aligned(files.ambient);
  s.irradiance = aligned(files.irradiance);
  s.occupancy = aligned(files.occupancy);
  s.hot_water = aligned(files.hot_water);
  s.standby = aligned(files.standby);
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw DataError(files.price.string() + ": " + e.what());
  }
  return s;
}

sim::Scenario scenario_for(const ConfigDocument& doc) {
  if (doc.files) return load_scenario(*doc.files, doc.dt);
  auto opts = doc.synthetic;
  opts.dt = doc.dt;
  return sim::synthetic_scenario(opts);
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "type",
      "comfort_bounds",
      "case",
      "ua_factor",
      "annual_cost_eur",
      "violations_degC_h",
      "freq_at_20_pct",
      "freq_18_20_20_22_pct",
      "freq_15_18_22_25_pct",
      "building_consumption_kwh",
      "share_building_lowprice_pct",
      "share_heating_lowprice_pct",
      "penalty_cost_eur",
      "error",
  };
  return columns;
}

namespace {

std::vector<std::string> trajectory_columns(HeaterVariant variant) {
  std::vector<std::string> cols = {"timestamp", "price"};
  for (const State s : active_states(variant)) cols.emplace_back(to_string(s));
  for (const Control c : active_controls(variant)) cols.emplace_back(to_string(c));
  for (const char* c : {"light", "load_power", "building_power", "v_room", "v_waterheater", "v_fridge", "v_light",
                        "room_lower", "room_upper"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (const char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Json metrics_json(const sim::GridRow& row) {
  const auto& cfg = row.cell.config;
  Json j = {{"type", std::string(to_string(cfg.heater))},
            {"comfort_bounds", std::string(mpc::to_string(cfg.bound_strategy))},
            {"case", std::string(mpc::to_string(cfg.flexibility))},
            {"ua_factor", cfg.ua_ra_factor}};
  if (row.metrics) {
    const auto& m = *row.metrics;
    j["annual_cost_eur"] = m.annual_cost;
    j["violations_degC_h"] = m.violations_degree_hours;
    j["freq_at_20_pct"] = m.freq_at_setpoint_pct;
    j["freq_18_20_20_22_pct"] = m.freq_near_band_pct;
    j["freq_15_18_22_25_pct"] = m.freq_far_band_pct;
    j["building_consumption_kwh"] = m.building_consumption_kwh;
    j["heating_consumption_kwh"] = m.heating_consumption_kwh;
    j["share_building_lowprice_pct"] = m.share_building_lowprice_pct;
    j["share_heating_lowprice_pct"] = m.share_heating_lowprice_pct;
    j["penalty_cost_eur"] = m.penalty_cost;
    j["diagnostics"] = m.diagnostics;
  } else {
    j["error"] = row.error;
  }
  j["seconds"] = row.seconds;
  return j;
}

}  // namespace

void write_trajectory(const fs::path& path, const sim::SimulationResult& result, const sim::Scenario& scenario) {
  if (scenario.size() < result.size()) throw DataError(path.string() + ": scenario shorter than the result");
  const auto variant = result.config.heater;
  auto out = open_output(path);
  const auto cols = trajectory_columns(variant);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (std::size_t t = 0; t < result.size(); ++t) {
    out << format_iso8601(scenario.timestamps[t]) << ',' << format_number(scenario.prices[t]);
    for (const State s : active_states(variant)) out << ',' << format_number(result.states[t][s]);
    for (const Control c : active_controls(variant)) out << ',' << format_number(result.controls[t][c]);
    const auto& v = result.slacks[t];
    for (const double x : {result.light[t], result.load_power[t], result.building_power[t], v.room, v.waterheater,
                           v.fridge, v.light, result.room_lower[t], result.room_upper[t]}) {
      out << ',' << format_number(x);
    }
    out << '\n';
  }
  close_output(out, path);
}

std::vector<TrajectoryRow> read_trajectory(const fs::path& path, HeaterVariant variant) {
  std::ifstream in(path, std::ios::binary);
  const std::string name = path.string();
  if (!in) throw DataError(name + ": cannot open");
  const auto cols = trajectory_columns(variant);
  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ":1:1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line, ',') != cols) throw DataError(name + ":1:1: header does not match the " +
                                                std::string(to_string(variant)) + " trajectory columns");
  std::vector<TrajectoryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != cols.size()) throw DataError(cell_error(name, line_no, 1, "wrong number of columns"));
    std::vector<double> v(cells.size(), 0.0);
    std::size_t col = cells[0].size() + 2;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto x = parse_number(cells[i]);
      if (!x) throw DataError(cell_error(name, line_no, col, "invalid number '" + cells[i] + "'"));
      v[i] = *x;
      col += cells[i].size() + 1;
    }
    TrajectoryRow row;
    const auto ts = parse_iso8601(cells[0]);
    if (!ts) throw DataError(cell_error(name, line_no, 1, "invalid timestamp '" + cells[0] + "'"));
    row.timestamp = *ts;
    std::size_t k = 1;
    row.price = v[k++];
    for (const State s : active_states(variant)) row.state.set(s, v[k++]);
    for (const Control c : active_controls(variant)) row.control[c] = v[k++];
    row.light = v[k++];
    row.load_power = v[k++];
    row.building_power = v[k++];
    row.slacks = {v[k], v[k + 1], v[k + 2], v[k + 3]};
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_metrics(const fs::path& out_dir, const std::vector<sim::GridRow>& rows) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError(out_dir.string() + ": " + ec.message());

  const auto csv_path = out_dir / "metrics.csv";
  auto csv = open_output(csv_path);
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
  csv << '\n';
  Json all = Json::array();
  for (const auto& row : rows) {
    const auto& cfg = row.cell.config;
    csv << to_string(cfg.heater) << ',' << mpc::to_string(cfg.bound_strategy) << ','
        << mpc::to_string(cfg.flexibility) << ',' << format_number(cfg.ua_ra_factor);
    if (row.metrics) {
      const auto& m = *row.metrics;
      for (const double x : {m.annual_cost, m.violations_degree_hours, m.freq_at_setpoint_pct, m.freq_near_band_pct,
                             m.freq_far_band_pct, m.building_consumption_kwh, m.share_building_lowprice_pct,
                             m.share_heating_lowprice_pct, m.penalty_cost}) {
        csv << ',' << format_number(x);
      }
      csv << ",\n";
    } else {
      csv << ",,,,,,,,,," << csv_field(row.error) << '\n';
    }
    all.push_back(metrics_json(row));
  }
  close_output(csv, csv_path);

  const auto json_path = out_dir / "metrics.json";
  auto json = open_output(json_path);
  json << all.dump(2) << '\n';
  close_output(json, json_path);
}

void write_results(const fs::path& out_dir, const sim::SimulationResult& result, const sim::Metrics& metrics,
                   const sim::Scenario& scenario) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError(out_dir.string() + ": " + ec.message());
  write_trajectory(out_dir / "trajectory.csv", result, scenario);
  sim::GridRow row;
  row.cell.config = result.config;
  row.cell.comfort = result.comfort;
  row.metrics = metrics;
  row.seconds = result.solve_seconds;
  write_metrics(out_dir, {row});
}

}  // namespace hems::io
