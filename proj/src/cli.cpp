#include "hems/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hems/format.hpp"
#include "hems/io.hpp"
#include "hems/lp.hpp"
#include "hems/oracles.hpp"

namespace hems::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<std::size_t> days;
  std::string preset = "comfort";
  std::string heater = "HVAC";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double value, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string clock_of(const sim::Scenario& scenario, std::size_t period) {
  const auto sod = ((scenario.timestamps[period] % 86400) + 86400) % 86400;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(sod / 3600), static_cast<int>(sod % 3600 / 60));
  return buf;
}

io::ConfigDocument load_document(const Options& opts, std::size_t default_days) {
  io::ConfigDocument doc;
  if (!opts.config.empty()) {
    if (!fs::exists(opts.config)) throw io::ConfigError(opts.config + ": config file not found");
    doc = io::load_config(opts.config);
  } else {
    doc.synthetic.days = default_days;
  }
  if (opts.seed) doc.synthetic.seed = *opts.seed;
  if (opts.days) {
    if (*opts.days == 0) throw UsageError("--days must be positive");
    doc.synthetic.days = *opts.days;
  }
  return doc;
}

sim::SimulationResult day_result(const mpc::DayPlan& plan, const mpc::HorizonProblem& problem,
                                 const sim::SimulationConfig& config) {
  sim::SimulationResult r;
  r.config = config;
  r.building = problem.building;
  r.comfort = problem.comfort;
  r.x0 = problem.x0;
  r.states = plan.states;
  r.controls = plan.controls;
  r.slacks = plan.slacks;
  r.light = plan.light;
  r.load_power = plan.load_power;
  r.building_power = plan.building_power;
  r.room_lower = plan.room_bounds.lower;
  r.room_upper = plan.room_bounds.upper;
  for (const auto& s : plan.loads) r.starts.push_back({0, s.name, s.start});
  r.electricity_cost = plan.electricity_cost;
  r.penalty_cost = plan.penalty_cost;
  r.horizons_solved = 1;
  r.lp_iterations = plan.lp_iterations;
  return r;
}

void print_metrics(std::ostream& out, const sim::Metrics& m) {
  out << "annual cost [EUR]            " << fixed(m.annual_cost) << '\n'
      << "penalty cost [EUR]           " << fixed(m.penalty_cost) << '\n'
      << "violations [degC h]          " << fixed(m.violations_degree_hours, 3) << '\n'
      << "freq at 20 degC [%]          " << fixed(m.freq_at_setpoint_pct, 1) << '\n'
      << "freq [18,22] degC [%]        " << fixed(m.freq_near_band_pct, 1) << '\n'
      << "freq [15,25] degC [%]        " << fixed(m.freq_far_band_pct, 1) << '\n'
      << "building consumption [kWh]   " << fixed(m.building_consumption_kwh, 1) << '\n'
      << "building low-price share [%] " << fixed(m.share_building_lowprice_pct, 1) << '\n'
      << "heating low-price share [%]  " << fixed(m.share_heating_lowprice_pct, 1) << '\n';
  for (const auto& d : m.diagnostics) out << "note: " << d << '\n';
}

int simulate_day(const Options& opts, std::ostream& out) {
  const auto doc = load_document(opts, 2);
  const auto scenario = io::scenario_for(doc);
  const auto& config = doc.simulation;
  const auto building = sim::effective_building(doc.building, config);
  const auto x0 = config.initial_state.value_or(sim::default_initial_state(config.heater));
  const auto problem = sim::horizon_problem(scenario, building, config, doc.comfort, doc.daily_loads(), 0, x0);
  mpc::SolveOptions solve;
  solve.formulation = config.formulation;
  const auto plan = mpc::solve_horizon(problem, solve);

  double energy = 0.0;
  for (const double p : plan.building_power) energy += p * problem.dt_hours();
  out << "horizon periods          " << problem.horizon_len << '\n'
      << "electricity cost [EUR]   " << fixed(plan.electricity_cost, 4) << '\n'
      << "penalty cost [EUR]       " << fixed(plan.penalty_cost, 4) << '\n'
      << "energy [kWh]             " << fixed(energy, 3) << '\n'
      << "LP iterations            " << plan.lp_iterations << '\n';
  for (const auto& s : plan.loads) {
    out << "start " << s.name << " at " << clock_of(scenario, s.start) << " (period " << s.start << "), cost "
        << fixed(s.cost, 4) << " EUR\n";
  }
  if (!opts.out.empty()) {
    const auto result = day_result(plan, problem, config);
    io::write_results(opts.out, result, sim::compute_metrics(result, scenario.slice(0, result.size())), scenario);
    out << "wrote " << opts.out << '\n';
  }
  return kOk;
}

int simulate_year(const Options& opts, std::ostream& out) {
  const auto doc = load_document(opts, 365);
  const auto scenario = io::scenario_for(doc);
  const auto result = sim::run_receding_horizon(scenario, doc.building, doc.simulation, doc.comfort, doc.daily_loads());
  const auto metrics = sim::compute_metrics(result, scenario);
  out << "periods " << result.size() << ", horizons " << result.horizons_solved << ", LP iterations "
      << result.lp_iterations << ", " << fixed(result.solve_seconds, 1) << " s\n";
  print_metrics(out, metrics);
  if (!opts.out.empty()) {
    io::write_results(opts.out, result, metrics, scenario);
    out << "wrote " << opts.out << '\n';
  }
  return kOk;
}

int case_grid(const Options& opts, std::ostream& out, std::ostream& err) {
  const auto doc = load_document(opts, 7);
  std::vector<sim::GridCell> cells;
  if (opts.preset == "comfort") {
    cells = sim::comfort_grid();
  } else if (opts.preset == "ua-sweep") {
    cells = sim::ua_sweep_grid(parse_heater_variant(opts.heater));
  } else {
    throw UsageError("--preset must be comfort or ua-sweep");
  }
  for (auto& cell : cells) {
    const auto& s = doc.simulation;
    cell.config.commit_len = s.commit_len;
    cell.config.lookahead_len = s.lookahead_len;
    cell.config.formulation = s.formulation;
    if (s.initial_state && s.initial_state->matches(cell.config.heater)) cell.config.initial_state = s.initial_state;
  }
  const auto scenario = io::scenario_for(doc);
  const auto rows = sim::run_case_grid(scenario, doc.building, cells, doc.daily_loads(), opts.threads);

  out << "type  bounds  case       ua    cost[EUR]  viol[degC h]  at20[%]  near[%]  far[%]  energy[kWh]  "
         "low-price u^b[%]  low-price heat[%]\n";
  bool failed = false;
  for (const auto& row : rows) {
    const auto& c = row.cell.config;
    char head[64];
    std::snprintf(head, sizeof head, "%-5s %-7s %-10s %-5s", std::string(to_string(c.heater)).c_str(),
                  std::string(mpc::to_string(c.bound_strategy)).c_str(),
                  std::string(mpc::to_string(c.flexibility)).c_str(), fixed(c.ua_ra_factor, 1).c_str());
    out << head;
    if (!row.metrics) {
      out << " failed: " << row.error << '\n';
      failed = true;
      continue;
    }
    const auto& m = *row.metrics;
    char line[256];
    std::snprintf(line, sizeof line, " %10.2f %13.3f %8.1f %8.1f %7.1f %12.1f %17.1f %18.1f\n", m.annual_cost,
                  m.violations_degree_hours, m.freq_at_setpoint_pct, m.freq_near_band_pct, m.freq_far_band_pct,
                  m.building_consumption_kwh, m.share_building_lowprice_pct, m.share_heating_lowprice_pct);
    out << line;
  }
  if (!opts.out.empty()) {
    io::write_metrics(opts.out, rows);
    out << "wrote " << opts.out << '\n';
  }
  if (failed) err << "some cells failed\n";
  return failed ? kFailure : kOk;
}

int validate(const Options& opts, std::ostream& out) {
  const std::uint64_t seed = opts.seed.value_or(7);
  const std::vector<oracle::SuiteResult> suites = {
      oracle::run_lp_vertex_suite(seed, 500),
      oracle::run_schedule_suite(seed, 1000),
      oracle::run_decomposition_suite(seed, 200),
  };
  bool ok = true;
  for (const auto& s : suites) {
    out << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.cases << " cases, " << s.failures
        << " failures, max error " << format_number(s.max_error);
    if (!s.detail.empty()) out << " (" << s.detail << ")";
    out << '\n';
    ok = ok && s.passed;
  }
  return ok ? kOk : kFailure;
}

int export_lp(const Options& opts, std::ostream& out) {
  const auto doc = load_document(opts, 2);
  const auto scenario = io::scenario_for(doc);
  const auto& config = doc.simulation;
  const auto building = sim::effective_building(doc.building, config);
  const auto x0 = config.initial_state.value_or(sim::default_initial_state(config.heater));
  const auto problem = sim::horizon_problem(scenario, building, config, doc.comfort, doc.daily_loads(), 0, x0);
  const auto assembled = mpc::assemble_lp(problem, config.formulation);
  if (opts.out.empty()) {
    lp::write_lp_format(assembled.lp, out);
    return kOk;
  }
  std::error_code ec;
  fs::create_directories(opts.out, ec);
  if (ec) throw io::DataError(opts.out + ": " + ec.message());
  const auto path = fs::path(opts.out) / "day.lp";
  std::ofstream file(path);
  if (!file) throw io::DataError(path.string() + ": cannot open for writing");
  lp::write_lp_format(assembled.lp, file);
  if (!file) throw io::DataError(path.string() + ": write failed");
  out << "wrote " << path.string() << " (" << assembled.lp.n_vars << " variables, " << assembled.lp.row_count()
      << " rows)\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Household energy management by economic model predictive control", "hems"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--config", opts.config, "Configuration file (JSON)");
  app.add_option("--out", opts.out, "Output directory");
  app.add_option("--seed", opts.seed, "Seed of the synthetic scenario and the oracle suites");
  app.add_option("--threads", opts.threads, "Worker threads for case grids")->check(CLI::PositiveNumber);

  auto* day = app.add_subcommand("simulate-day", "Solve the first horizon and print the day plan");
  auto* year = app.add_subcommand("simulate-year", "Receding-horizon run over the whole scenario");
  year->add_option("--days", opts.days, "Days of the synthetic scenario (default 365)");
  auto* grid = app.add_subcommand("case-grid", "Run a grid of heater, bound strategy and flexibility cases");
  grid->add_option("--preset", opts.preset, "comfort or ua-sweep")->check(CLI::IsMember({"comfort", "ua-sweep"}));
  grid->add_option("--heater", opts.heater, "Heater of the ua-sweep grid (FH or HVAC)");
  grid->add_option("--days", opts.days, "Days of the synthetic scenario (default 7)");
  auto* check = app.add_subcommand("validate", "Run the LP, scheduling and decomposition oracle suites");
  auto* lp = app.add_subcommand("export-lp", "Write the LP of the first horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.get_formatter()->make_help(&app, "hems", CLI::AppFormatMode::Normal);
    return kConfigError;
  }

  try {
    if (day->parsed()) return simulate_day(opts, out);
    if (year->parsed()) return simulate_year(opts, out);
    if (grid->parsed()) return case_grid(opts, out, err);
    if (check->parsed()) return validate(opts, out);
    if (lp->parsed()) return export_lp(opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.get_formatter()->make_help(&app, "hems", CLI::AppFormatMode::Normal);
    return kConfigError;
  } catch (const io::ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const io::DataError& e) {
    err << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ModelError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kConfigError;
}

}  // namespace hems::cli
