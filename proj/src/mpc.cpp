#include "hems/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hems::mpc {

namespace {

constexpr double kTieTolerance = 1e-12;

bool cost_below(double candidate, double incumbent) {
  return candidate < incumbent - kTieTolerance * std::max(1.0, std::abs(incumbent));
}

double clamp_to(double value, double lo, double hi) { return std::min(std::max(value, lo), hi); }

}  // namespace

std::string_view to_string(BoundStrategy strategy) {
  return strategy == BoundStrategy::PriceIndependent ? "PI-CB" : "PD-CB";
}

std::string_view to_string(Flexibility flexibility) {
  switch (flexibility) {
    case Flexibility::NoFlex: return "noflex";
    case Flexibility::Flex: return "flex";
    case Flexibility::ExtraFlex: return "extraflex";
  }
  return "?";
}

BoundStrategy parse_bound_strategy(std::string_view text) {
  if (text == "PI-CB" || text == "pi-cb" || text == "price_independent") return BoundStrategy::PriceIndependent;
  if (text == "PD-CB" || text == "pd-cb" || text == "price_dependent") return BoundStrategy::PriceDependent;
  throw MpcError("unknown comfort-bound strategy '" + std::string(text) + "'");
}

Flexibility parse_flexibility(std::string_view text) {
  if (text == "noflex") return Flexibility::NoFlex;
  if (text == "flex") return Flexibility::Flex;
  if (text == "extraflex") return Flexibility::ExtraFlex;
  throw MpcError("unknown flexibility case '" + std::string(text) + "'");
}

ComfortProfile ComfortProfile::preset(Flexibility flexibility, BoundStrategy strategy) {
  ComfortProfile p;
  p.bound_strategy = strategy;
  p.flexibility_label = flexibility;
  p.room_setpoint = 20.0;
  switch (flexibility) {
    case Flexibility::NoFlex:
      p.alpha = 0.0;
      p.wh_bounds = {54.0, 56.0};
      p.rf_bounds = {4.9, 5.1};
      break;
    case Flexibility::Flex:
      p.alpha = 2.0;
      p.wh_bounds = {50.0, 60.0};
      p.rf_bounds = {4.0, 5.0};
      break;
    case Flexibility::ExtraFlex:
      p.alpha = 5.0;
      p.wh_bounds = {45.0, 65.0};
      p.rf_bounds = {3.0, 6.0};
      break;
  }
  return p;
}

void ComfortProfile::validate() const {
  if (!std::isfinite(room_setpoint)) throw MpcError("room setpoint must be finite");
  if (!(alpha >= 0.0)) throw MpcError("alpha must be non-negative");
  if (!(wh_bounds.lower < wh_bounds.upper)) throw MpcError("water-heater band must have lower < upper");
  if (!(rf_bounds.lower < rf_bounds.upper)) throw MpcError("refrigerator band must have lower < upper");
  if (!(light_bounds_lux.lower < light_bounds_lux.upper)) throw MpcError("light band must have lower < upper");
  if (!(rho_temp >= 0.0) || !(rho_light >= 0.0)) throw MpcError("penalties must be non-negative");
  if (!(blind_min >= 0.0 && blind_min <= 1.0)) throw MpcError("blind_min must lie in [0, 1]");
}

RoomBounds build_comfort_bounds(const ComfortProfile& profile, std::span<const double> prices,
                                std::size_t horizon_len, std::size_t periods_per_day,
                                std::size_t first_period_offset) {
  if (profile.bound_strategy == BoundStrategy::PriceDependent && prices.size() < horizon_len) {
    throw MpcError("price series shorter than the horizon");
  }
  std::vector<double> weight(horizon_len, 1.0);
  if (profile.bound_strategy == BoundStrategy::PriceDependent) {
    const std::size_t day = periods_per_day == 0 ? horizon_len : periods_per_day;
    std::size_t begin = 0;
    while (begin < horizon_len) {
      const std::size_t offset = periods_per_day == 0 ? 0 : (first_period_offset + begin) % day;
      const std::size_t end = std::min(horizon_len, begin + (day - offset));
      const auto [lo, hi] = std::minmax_element(prices.begin() + static_cast<std::ptrdiff_t>(begin),
                                                prices.begin() + static_cast<std::ptrdiff_t>(end));
      if (*hi > *lo) {
        for (std::size_t t = begin; t < end; ++t) weight[t] = (prices[t] - *lo) / (*hi - *lo);
      }
      begin = end;
    }
  }
  RoomBounds bounds;
  bounds.lower.resize(horizon_len);
  bounds.upper.resize(horizon_len);
  for (std::size_t t = 0; t < horizon_len; ++t) {
    bounds.lower[t] = profile.room_setpoint - profile.alpha * weight[t];
    bounds.upper[t] = profile.room_setpoint + profile.alpha * weight[t];
  }
  return bounds;
}

std::vector<std::size_t> UninterruptibleLoad::feasible_starts(std::size_t horizon_len) const {
  std::vector<std::size_t> starts;
  const std::size_t len = cycle_len();
  if (len == 0) return starts;
  std::vector<char> permitted(horizon_len, 0);
  for (const auto t : window) {
    if (t < horizon_len) permitted[t] = 1;
  }
  std::size_t run = 0;
  for (std::size_t t = 0; t < horizon_len; ++t) {
    run = permitted[t] ? run + 1 : 0;
    if (run >= len) starts.push_back(t + 1 - len);
  }
  return starts;
}

void UninterruptibleLoad::validate() const {
  if (cycle_phases.empty()) throw MpcError("load '" + name + "' has no cycle phases");
  for (const double p : cycle_phases) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw MpcError("load '" + name + "' has a negative phase power");
  }
}

LoadSchedule schedule_uninterruptible(const UninterruptibleLoad& load, std::span<const double> prices,
                                      double dt_hours) {
  load.validate();
  const auto starts = load.feasible_starts(prices.size());
  if (starts.empty()) {
    throw NoFeasibleStart("load '" + load.name + "': no run of " + std::to_string(load.cycle_len()) +
                          " consecutive permitted periods");
  }
  std::vector<double> costs;
  costs.reserve(starts.size());
  for (const auto s : starts) {
    double sum = 0.0;
    for (std::size_t c = 0; c < load.cycle_len(); ++c) sum += prices[s + c] * load.cycle_phases[c];
    costs.push_back(dt_hours * sum);
  }
  const double best = *std::min_element(costs.begin(), costs.end());
  std::size_t pick = 0;
  while (cost_below(best, costs[pick])) ++pick;

  LoadSchedule schedule;
  schedule.name = load.name;
  schedule.start = starts[pick];
  schedule.cost = costs[pick];
  schedule.power.assign(prices.size(), 0.0);
  for (std::size_t c = 0; c < load.cycle_len(); ++c) schedule.power[schedule.start + c] = load.cycle_phases[c];
  return schedule;
}

void HorizonProblem::validate() const {
  if (horizon_len == 0) throw MpcError("horizon must contain at least one period");
  if (prices.size() != horizon_len || disturbances.size() != horizon_len || occupied.size() != horizon_len ||
      model.n_steps() != horizon_len) {
    throw MpcError("horizon sequences have inconsistent lengths");
  }
  for (const double p : prices) {
    if (!std::isfinite(p)) throw MpcError("non-finite price");
  }
  if (!x0.matches(model.variant)) throw MpcError("initial state does not match the heater variant");
  building.validate();
  comfort.validate();
  for (const auto& load : loads) load.validate();
}

HorizonProblem make_horizon_problem(const BuildingSpec& building, HeaterVariant variant,
                                    const StateVector& x0, std::vector<double> prices,
                                    std::vector<DisturbanceVector> disturbances,
                                    const ComfortProfile& comfort,
                                    std::vector<UninterruptibleLoad> loads, double dt,
                                    std::size_t periods_per_day, std::size_t first_period_offset,
                                    bool lighting_enabled) {
  HorizonProblem p;
  p.building = building;
  p.model = build_discrete_model(building, variant, disturbances, dt);
  p.x0 = x0;
  p.horizon_len = prices.size();
  p.prices = std::move(prices);
  p.occupied.resize(disturbances.size());
  for (std::size_t t = 0; t < disturbances.size(); ++t) p.occupied[t] = disturbances[t].occupancy > 0.0;
  p.disturbances = std::move(disturbances);
  p.comfort = comfort;
  p.loads = std::move(loads);
  p.periods_per_day = periods_per_day;
  p.first_period_offset = first_period_offset;
  p.lighting_enabled = lighting_enabled;
  p.validate();
  return p;
}

namespace {

struct ComfortRow {
  State state;
  int slack;
  double lower;
  double upper;
};

// Shared by both formulations: control, slack and light variables of one
// period, light rows, and the bounds that depend on occupancy.
void add_period_variables(const HorizonProblem& problem, std::size_t t, lp::LinearProgram& lp,
                          PeriodVars& vars) {
  const auto& spec = problem.building;
  const double energy_price = problem.prices[t] * problem.dt_hours();
  const bool lit = problem.lighting_enabled && problem.occupied[t];
  const std::string suffix = "_" + std::to_string(t);

  for (const Control c : active_controls(problem.variant())) {
    double lower = 0.0;
    if (c == Control::Blind && lit) lower = problem.comfort.blind_min;
    const double cost = c == Control::Blind ? 0.0 : energy_price;
    vars.control[static_cast<std::size_t>(c)] =
        lp.add_variable(lower, spec.upper_bound(c), cost, "u_" + std::string(to_string(c)) + suffix);
  }
  vars.v_room = lp.add_variable(0.0, lp::kInf, problem.comfort.rho_temp, "v_room" + suffix);
  vars.v_waterheater = lp.add_variable(0.0, lp::kInf, problem.comfort.rho_temp, "v_wh" + suffix);
  vars.v_fridge = lp.add_variable(0.0, lp::kInf, problem.comfort.rho_temp, "v_rf" + suffix);

  if (lit) {
    const double floor_area = spec.floor_area;
    const double phi = problem.disturbances[t].solar_illuminance;
    vars.light = lp.add_variable(-lp::kInf, lp::kInf, 0.0, "light" + suffix);
    vars.v_light = lp.add_variable(0.0, lp::kInf, problem.comfort.rho_light, "v_light" + suffix);
    lp.add_equality({{vars.light, 1.0},
                     {vars.control[static_cast<std::size_t>(Control::Blind)], -phi},
                     {vars.control[static_cast<std::size_t>(Control::Light)], -spec.lum_efficacy_indoor}},
                    0.0, "light_level" + suffix);
    lp.add_greater_equal({{vars.light, 1.0}, {vars.v_light, 1.0}},
                         problem.comfort.light_bounds_lux.lower * floor_area, "light_min" + suffix);
    lp.add_less_equal({{vars.light, 1.0}, {vars.v_light, -1.0}},
                      problem.comfort.light_bounds_lux.upper * floor_area, "light_max" + suffix);
  }
}

std::vector<ComfortRow> comfort_rows(const HorizonProblem& problem, const RoomBounds& room, std::size_t t,
                                     const PeriodVars& vars) {
  return {{State::Room, vars.v_room, room.lower[t], room.upper[t]},
          {State::WaterHeater, vars.v_waterheater, problem.comfort.wh_bounds.lower,
           problem.comfort.wh_bounds.upper},
          {State::Fridge, vars.v_fridge, problem.comfort.rf_bounds.lower, problem.comfort.rf_bounds.upper}};
}

}  // namespace

AssembledLp assemble_lp(const HorizonProblem& problem, Formulation formulation) {
  problem.validate();
  const auto variant = problem.variant();
  const auto states = active_states(variant);
  const auto controls = active_controls(variant);
  const auto ns = static_cast<Eigen::Index>(states.size());
  const std::size_t horizon = problem.horizon_len;

  AssembledLp out;
  out.formulation = formulation;
  out.room_bounds = build_comfort_bounds(problem.comfort, problem.prices, horizon, problem.periods_per_day,
                                         problem.first_period_offset);
  out.vars.resize(horizon);
  auto& lp = out.lp;

  Eigen::VectorXd x0(ns);
  for (Eigen::Index i = 0; i < ns; ++i) x0(i) = problem.x0[states[static_cast<std::size_t>(i)]];

  if (formulation == Formulation::Sparse) {
    for (std::size_t t = 0; t < horizon; ++t) {
      auto& vars = out.vars[t];
      add_period_variables(problem, t, lp, vars);
      for (const State s : states) {
        vars.state[static_cast<std::size_t>(s)] = lp.add_variable(
            -lp::kInf, lp::kInf, 0.0, "x_" + std::string(to_string(s)) + "_" + std::to_string(t));
      }
      const auto& a = problem.model.a_mats[t];
      const auto& b = problem.model.b_mats[t];
      const Eigen::VectorXd ez = problem.model.e_mats[t] * input_vector(problem.disturbances[t]);
      // x_{t+1} - A x_t - B u_t = E z_t, with x_0 moved to the right-hand side.
      for (Eigen::Index i = 0; i < ns; ++i) {
        std::vector<lp::Term> terms;
        terms.push_back({vars.state[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])], 1.0});
        double rhs = ez(i);
        for (Eigen::Index k = 0; k < ns; ++k) {
          if (a(i, k) == 0.0) continue;
          if (t == 0) {
            rhs += a(i, k) * x0(k);
          } else {
            const auto prev = out.vars[t - 1].state[static_cast<std::size_t>(states[static_cast<std::size_t>(k)])];
            terms.push_back({prev, -a(i, k)});
          }
        }
        for (std::size_t c = 0; c < controls.size(); ++c) {
          const double coef = b(i, static_cast<Eigen::Index>(c));
          if (coef != 0.0) terms.push_back({vars.control[static_cast<std::size_t>(controls[c])], -coef});
        }
        lp.add_equality(std::move(terms), rhs,
                        "dyn_" + std::string(to_string(states[static_cast<std::size_t>(i)])) + "_" +
                            std::to_string(t));
      }
      for (const auto& row : comfort_rows(problem, out.room_bounds, t, vars)) {
        const int x = vars.state[static_cast<std::size_t>(row.state)];
        const std::string tag = std::string(to_string(row.state)) + "_" + std::to_string(t);
        lp.add_less_equal({{x, 1.0}, {row.slack, -1.0}}, row.upper, "max_" + tag);
        lp.add_greater_equal({{x, 1.0}, {row.slack, 1.0}}, row.lower, "min_" + tag);
      }
    }
    return out;
  }

  // Condensed: every state is an affine function of the controls so far.
  // Column 0 of `affine` holds the constant, column 1 + v the coefficient of
  // LP variable v.
  for (std::size_t t = 0; t < horizon; ++t) add_period_variables(problem, t, lp, out.vars[t]);
  const auto n_vars = static_cast<Eigen::Index>(lp.n_vars);
  Eigen::MatrixXd affine = Eigen::MatrixXd::Zero(ns, n_vars + 1);
  affine.col(0) = x0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& vars = out.vars[t];
    Eigen::MatrixXd next = problem.model.a_mats[t] * affine;
    next.col(0) += problem.model.e_mats[t] * input_vector(problem.disturbances[t]);
    for (std::size_t c = 0; c < controls.size(); ++c) {
      const int v = vars.control[static_cast<std::size_t>(controls[c])];
      next.col(v + 1) += problem.model.b_mats[t].col(static_cast<Eigen::Index>(c));
    }
    affine = std::move(next);

    for (const auto& row : comfort_rows(problem, out.room_bounds, t, vars)) {
      const auto i = static_cast<Eigen::Index>(*state_slot(variant, row.state));
      std::vector<lp::Term> terms;
      for (Eigen::Index v = 0; v < n_vars; ++v) {
        if (affine(i, v + 1) != 0.0) terms.push_back({static_cast<int>(v), affine(i, v + 1)});
      }
      const double constant = affine(i, 0);
      const std::string tag = std::string(to_string(row.state)) + "_" + std::to_string(t);
      auto upper_terms = terms;
      upper_terms.push_back({row.slack, -1.0});
      lp.add_less_equal(std::move(upper_terms), row.upper - constant, "max_" + tag);
      terms.push_back({row.slack, 1.0});
      lp.add_greater_equal(std::move(terms), row.lower - constant, "min_" + tag);
    }
  }
  return out;
}

double building_power(const ControlVector& u, double load_power, double standby) {
  return u.electrical_kw() + load_power + standby;
}

std::vector<StateVector> replay(const DiscreteModel& model, const StateVector& x0,
                                std::span<const ControlVector> controls,
                                std::span<const DisturbanceVector> disturbances) {
  if (controls.size() != disturbances.size()) throw MpcError("replay sequences differ in length");
  std::vector<StateVector> states;
  states.reserve(controls.size());
  StateVector x = x0;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    x = step(model, t, x, controls[t], disturbances[t]);
    states.push_back(x);
  }
  return states;
}

namespace {

struct ContinuousPart {
  std::vector<ControlVector> controls;
  RoomBounds room_bounds;
  double objective = 0.0;
  int iterations = 0;
};

ContinuousPart solve_continuous(const HorizonProblem& problem, const SolveOptions& options) {
  const AssembledLp assembled = assemble_lp(problem, options.formulation);
  const lp::LpSolution solution = lp::solve(assembled.lp, options.lp);
  if (solution.status != lp::Status::Optimal) {
    throw MpcError("horizon LP is " + lp::to_string(solution.status) +
                   " (control bounds conflict structurally with the comfort rows)");
  }
  ContinuousPart part;
  part.room_bounds = assembled.room_bounds;
  part.objective = solution.objective_value;
  part.iterations = solution.iterations;
  part.controls.resize(problem.horizon_len);
  for (std::size_t t = 0; t < problem.horizon_len; ++t) {
    for (const Control c : active_controls(problem.variant())) {
      const int v = assembled.vars[t].control[static_cast<std::size_t>(c)];
      const auto j = static_cast<std::size_t>(v);
      part.controls[t][c] = clamp_to(solution.primal[j], assembled.lp.lower_bounds[j], assembled.lp.upper_bounds[j]);
    }
  }
  return part;
}

// Replays the controls and evaluates slacks, light, power and costs for a
// fixed set of load schedules.
DayPlan compose_plan(const HorizonProblem& problem, const ContinuousPart& part,
                     std::vector<LoadSchedule> schedules) {
  const std::size_t horizon = problem.horizon_len;
  const auto& spec = problem.building;
  const auto& comfort = problem.comfort;
  const double dt_hours = problem.dt_hours();

  DayPlan plan;
  plan.controls = part.controls;
  plan.room_bounds = part.room_bounds;
  plan.lp_objective = part.objective;
  plan.lp_iterations = part.iterations;
  plan.states = replay(problem.model, problem.x0, plan.controls, problem.disturbances);
  plan.loads = std::move(schedules);
  plan.slacks.resize(horizon);
  plan.light.resize(horizon);
  plan.load_power.assign(horizon, 0.0);
  plan.building_power.resize(horizon);

  auto excess = [](double x, double lo, double hi) { return std::max({0.0, lo - x, x - hi}); };
  double penalty_temp = 0.0;
  double penalty_light = 0.0;
  double electricity = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& x = plan.states[t];
    const auto& u = plan.controls[t];
    auto& v = plan.slacks[t];
    v.room = excess(x[State::Room], plan.room_bounds.lower[t], plan.room_bounds.upper[t]);
    v.waterheater = excess(x[State::WaterHeater], comfort.wh_bounds.lower, comfort.wh_bounds.upper);
    v.fridge = excess(x[State::Fridge], comfort.rf_bounds.lower, comfort.rf_bounds.upper);
    plan.light[t] = problem.disturbances[t].solar_illuminance * u.blind + spec.lum_efficacy_indoor * u.al;
    if (problem.lighting_enabled && problem.occupied[t]) {
      v.light = excess(plan.light[t], comfort.light_bounds_lux.lower * spec.floor_area,
                       comfort.light_bounds_lux.upper * spec.floor_area);
    }
    penalty_temp += v.room + v.waterheater + v.fridge;
    penalty_light += v.light;

    for (const auto& s : plan.loads) plan.load_power[t] += s.power[t];
    plan.building_power[t] = building_power(u, plan.load_power[t], problem.disturbances[t].standby);
    electricity += problem.prices[t] * dt_hours * plan.building_power[t];
  }
  plan.electricity_cost = electricity;
  plan.penalty_cost = comfort.rho_temp * penalty_temp + comfort.rho_light * penalty_light;
  return plan;
}

}  // namespace

DayPlan solve_horizon(const HorizonProblem& problem, const SolveOptions& options) {
  problem.validate();
  std::vector<LoadSchedule> schedules;
  schedules.reserve(problem.loads.size());
  for (const auto& load : problem.loads) {
    schedules.push_back(schedule_uninterruptible(load, problem.prices, problem.dt_hours()));
  }
  const ContinuousPart part = solve_continuous(problem, options);
  return compose_plan(problem, part, std::move(schedules));
}

DayPlan joint_oracle(const HorizonProblem& problem, const SolveOptions& options, std::size_t combination_cap) {
  problem.validate();
  const std::size_t horizon = problem.horizon_len;
  std::vector<std::vector<std::size_t>> starts;
  double combinations = 1.0;
  for (const auto& load : problem.loads) {
    starts.push_back(load.feasible_starts(horizon));
    if (starts.back().empty()) throw NoFeasibleStart("load '" + load.name + "' has no feasible start");
    combinations *= static_cast<double>(starts.back().size());
  }
  if (combinations > static_cast<double>(combination_cap)) {
    throw MpcError("joint oracle: " + std::to_string(static_cast<long long>(combinations)) +
                   " start combinations exceed the cap");
  }

  const ContinuousPart part = solve_continuous(problem, options);
  std::vector<double> lp_power(horizon);
  for (std::size_t t = 0; t < horizon; ++t) lp_power[t] = part.controls[t].electrical_kw();
  const double dt_hours = problem.dt_hours();

  std::vector<std::size_t> choice(problem.loads.size(), 0);
  std::vector<std::size_t> best_choice;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> total(horizon);
  while (true) {
    // Full building power for this combination, priced period by period.
    for (std::size_t t = 0; t < horizon; ++t) total[t] = lp_power[t] + problem.disturbances[t].standby;
    for (std::size_t i = 0; i < problem.loads.size(); ++i) {
      const auto& phases = problem.loads[i].cycle_phases;
      const std::size_t s = starts[i][choice[i]];
      for (std::size_t c = 0; c < phases.size(); ++c) total[s + c] += phases[c];
    }
    double cost = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) cost += problem.prices[t] * dt_hours * total[t];
    if (best_choice.empty() || cost_below(cost, best_cost)) {
      best_cost = cost;
      best_choice = choice;
    }
    std::size_t i = 0;
    while (i < choice.size() && ++choice[i] == starts[i].size()) choice[i++] = 0;
    if (i == choice.size()) break;
  }

  std::vector<LoadSchedule> schedules;
  for (std::size_t i = 0; i < problem.loads.size(); ++i) {
    const auto& load = problem.loads[i];
    LoadSchedule s;
    s.name = load.name;
    s.start = starts[i][best_choice[i]];
    s.power.assign(horizon, 0.0);
    for (std::size_t c = 0; c < load.cycle_len(); ++c) {
      s.power[s.start + c] = load.cycle_phases[c];
      s.cost += problem.prices[s.start + c] * load.cycle_phases[c];
    }
    s.cost *= dt_hours;
    schedules.push_back(std::move(s));
  }
  return compose_plan(problem, part, std::move(schedules));
}

}  // namespace hems::mpc
