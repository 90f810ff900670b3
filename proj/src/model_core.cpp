#include "hems/model_core.hpp"

#include <cmath>
#include <sstream>

namespace hems {

namespace {

constexpr std::array<State, 5> kFloorHeatingStates = {State::Room, State::Floor, State::PipeWater,
                                                       State::Fridge, State::WaterHeater};
constexpr std::array<State, 3> kHvacStates = {State::Room, State::Fridge, State::WaterHeater};

constexpr std::array<Control, 5> kFloorHeatingControls = {
    Control::HeatPump, Control::Light, Control::Blind, Control::Fridge, Control::WaterHeater};
constexpr std::array<Control, 6> kHvacControls = {Control::Heat,  Control::Cool,
                                                  Control::Light, Control::Blind,
                                                  Control::Fridge, Control::WaterHeater};

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ModelError(std::string("building parameter '") + name + "' must be positive");
  }
}

void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ModelError(std::string("building parameter '") + name + "' must be non-negative");
  }
}

}  // namespace

std::string_view to_string(HeaterVariant variant) {
  return variant == HeaterVariant::FloorHeating ? "FH" : "HVAC";
}

HeaterVariant parse_heater_variant(std::string_view text) {
  if (text == "FH" || text == "fh" || text == "floor_heating") return HeaterVariant::FloorHeating;
  if (text == "HVAC" || text == "hvac") return HeaterVariant::Hvac;
  throw ModelError("unknown heater variant '" + std::string(text) + "'");
}

std::string_view to_string(State state) {
  switch (state) {
    case State::Room: return "room";
    case State::Floor: return "floor";
    case State::PipeWater: return "pipe_water";
    case State::Fridge: return "fridge";
    case State::WaterHeater: return "waterheater";
  }
  return "?";
}

std::string_view to_string(Control control) {
  switch (control) {
    case Control::HeatPump: return "hp";
    case Control::Heat: return "heat";
    case Control::Cool: return "cool";
    case Control::Light: return "al";
    case Control::Blind: return "blind";
    case Control::Fridge: return "rf";
    case Control::WaterHeater: return "wh";
  }
  return "?";
}

std::span<const State> active_states(HeaterVariant variant) {
  if (variant == HeaterVariant::FloorHeating) return kFloorHeatingStates;
  return kHvacStates;
}

std::span<const Control> active_controls(HeaterVariant variant) {
  if (variant == HeaterVariant::FloorHeating) return kFloorHeatingControls;
  return kHvacControls;
}

std::optional<std::size_t> state_slot(HeaterVariant variant, State state) {
  const auto states = active_states(variant);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == state) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> control_slot(HeaterVariant variant, Control control) {
  const auto controls = active_controls(variant);
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (controls[i] == control) return i;
  }
  return std::nullopt;
}

void BuildingSpec::validate() const {
  require_non_negative(ua_room_ambient, "ua_room_ambient");
  require_non_negative(ua_floor_room, "ua_floor_room");
  require_non_negative(ua_water_floor, "ua_water_floor");
  require_non_negative(ua_room_fridge, "ua_room_fridge");
  require_non_negative(ua_waterheater_ambient, "ua_waterheater_ambient");
  require_positive(cap_room, "cap_room");
  require_positive(cap_floor, "cap_floor");
  require_positive(cap_pipewater, "cap_pipewater");
  require_positive(cap_fridge, "cap_fridge");
  require_positive(cap_waterheater, "cap_waterheater");
  require_positive(cop_hp, "cop_hp");
  require_positive(cop_heat, "cop_heat");
  require_positive(cop_cool, "cop_cool");
  require_positive(cop_fridge, "cop_fridge");
  require_positive(cop_waterheater, "cop_waterheater");
  require_non_negative(pmax_hp, "pmax_hp");
  require_non_negative(pmax_heat, "pmax_heat");
  require_non_negative(pmax_cool, "pmax_cool");
  require_non_negative(pmax_wh, "pmax_wh");
  require_non_negative(pmax_rf, "pmax_rf");
  require_non_negative(pmax_al, "pmax_al");
  require_positive(floor_area, "floor_area");
  // A zero window is the no-window case of the insulation study.
  require_non_negative(window_area, "window_area");
  if (!(solar_transmittance_split >= 0.0 && solar_transmittance_split <= 1.0)) {
    throw ModelError("building parameter 'solar_transmittance_split' must lie in [0, 1]");
  }
  require_non_negative(internal_gain_per_occupancy, "internal_gain_per_occupancy");
  require_non_negative(water_specific_heat, "water_specific_heat");
  if (!std::isfinite(inlet_water_temp)) {
    throw ModelError("building parameter 'inlet_water_temp' must be finite");
  }
  require_positive(lum_efficacy_indoor, "lum_efficacy_indoor");
  require_positive(lum_efficacy_daylight, "lum_efficacy_daylight");
}

double BuildingSpec::upper_bound(Control control) const {
  switch (control) {
    case Control::HeatPump: return pmax_hp;
    case Control::Heat: return pmax_heat;
    case Control::Cool: return pmax_cool;
    case Control::Light: return pmax_al;
    case Control::Blind: return 1.0;
    case Control::Fridge: return pmax_rf;
    case Control::WaterHeater: return pmax_wh;
  }
  return 0.0;
}

StateVector StateVector::make(HeaterVariant variant, double room, double floor, double pipe_water,
                              double fridge, double water_heater) {
  StateVector x;
  x.set(State::Room, room);
  x.set(State::Fridge, fridge);
  x.set(State::WaterHeater, water_heater);
  if (variant == HeaterVariant::FloorHeating) {
    x.set(State::Floor, floor);
    x.set(State::PipeWater, pipe_water);
  }
  return x;
}

double StateVector::operator[](State state) const {
  const auto& value = values_[index(state)];
  if (!value) {
    throw ModelError("state '" + std::string(to_string(state)) + "' is disabled");
  }
  return *value;
}

bool StateVector::matches(HeaterVariant variant) const {
  for (std::size_t i = 0; i < kStateCount; ++i) {
    const bool expected = state_slot(variant, static_cast<State>(i)).has_value();
    if (values_[i].has_value() != expected) return false;
  }
  return true;
}

double& ControlVector::operator[](Control control) {
  switch (control) {
    case Control::HeatPump: return hp;
    case Control::Heat: return heat;
    case Control::Cool: return cool;
    case Control::Light: return al;
    case Control::Blind: return blind;
    case Control::Fridge: return rf;
    case Control::WaterHeater: return wh;
  }
  throw ModelError("invalid control");
}

double ControlVector::operator[](Control control) const {
  return const_cast<ControlVector&>(*this)[control];
}

double ControlVector::electrical_kw() const { return hp + heat + cool + al + rf + wh; }

void DisturbanceVector::validate() const {
  if (!std::isfinite(ambient)) throw ModelError("ambient temperature must be finite");
  if (!(occupancy >= 0.0)) throw ModelError("occupancy must be non-negative");
  if (!(hot_water_draw >= 0.0)) throw ModelError("hot-water draw must be non-negative");
  if (!(solar_illuminance >= 0.0)) throw ModelError("solar illuminance must be non-negative");
  if (!std::isfinite(standby)) throw ModelError("standby power must be finite");
}

double solar_illuminance(double irradiance, double window_area, double daylight_efficacy) {
  return irradiance * daylight_efficacy * window_area;
}

ContinuousModel build_continuous_coefficients(const BuildingSpec& spec, HeaterVariant variant,
                                              std::span<const DisturbanceVector> disturbances,
                                              double period_seconds) {
  spec.validate();
  if (disturbances.empty()) throw ModelError("disturbance sequence is empty");
  if (!(period_seconds > 0.0)) throw ModelError("period length must be positive");
  if (variant != HeaterVariant::FloorHeating && variant != HeaterVariant::Hvac) {
    throw ModelError("unknown heater variant");
  }

  const auto n_states = active_states(variant).size();
  const auto n_controls = active_controls(variant).size();
  const bool floor_heating = variant == HeaterVariant::FloorHeating;

  auto s = [variant](State state) { return static_cast<Eigen::Index>(*state_slot(variant, state)); };
  auto c = [variant](Control control) {
    return static_cast<Eigen::Index>(*control_slot(variant, control));
  };
  const auto amb = static_cast<Eigen::Index>(Input::Ambient);
  const auto occ = static_cast<Eigen::Index>(Input::Occupancy);
  const auto hwd = static_cast<Eigen::Index>(Input::HotWater);

  ContinuousModel model;
  model.variant = variant;
  model.period_seconds = period_seconds;
  model.periods.reserve(disturbances.size());

  for (const auto& z : disturbances) {
    z.validate();
    PeriodCoefficients p;
    p.a = Eigen::MatrixXd::Zero(n_states, n_states);
    p.b = Eigen::MatrixXd::Zero(n_states, n_controls);
    p.e = Eigen::MatrixXd::Zero(n_states, kInputCount);

    const double solar_watts = z.solar_illuminance / spec.lum_efficacy_daylight;
    // Without a floor node the whole window gain lands in the room air.
    const double room_solar_share = floor_heating ? spec.solar_transmittance_split : 1.0;

    // Room air.
    const double cr = spec.cap_room;
    double room_loss = spec.ua_room_ambient + spec.ua_room_fridge;
    if (floor_heating) {
      room_loss += spec.ua_floor_room;
      p.a(s(State::Room), s(State::Floor)) = spec.ua_floor_room / cr;
    } else {
      p.b(s(State::Room), c(Control::Heat)) = 1000.0 * spec.cop_heat / cr;
      p.b(s(State::Room), c(Control::Cool)) = -1000.0 * spec.cop_cool / cr;
    }
    p.a(s(State::Room), s(State::Room)) = -room_loss / cr;
    p.a(s(State::Room), s(State::Fridge)) = spec.ua_room_fridge / cr;
    p.b(s(State::Room), c(Control::Light)) = 1000.0 / cr;
    p.b(s(State::Room), c(Control::Blind)) = room_solar_share * solar_watts / cr;
    p.e(s(State::Room), amb) = spec.ua_room_ambient / cr;
    p.e(s(State::Room), occ) = 1000.0 * spec.internal_gain_per_occupancy / cr;

    if (floor_heating) {
      const double cf = spec.cap_floor;
      p.a(s(State::Floor), s(State::Floor)) = -(spec.ua_floor_room + spec.ua_water_floor) / cf;
      p.a(s(State::Floor), s(State::Room)) = spec.ua_floor_room / cf;
      p.a(s(State::Floor), s(State::PipeWater)) = spec.ua_water_floor / cf;
      p.b(s(State::Floor), c(Control::Blind)) = (1.0 - room_solar_share) * solar_watts / cf;

      const double cw = spec.cap_pipewater;
      p.a(s(State::PipeWater), s(State::PipeWater)) = -spec.ua_water_floor / cw;
      p.a(s(State::PipeWater), s(State::Floor)) = spec.ua_water_floor / cw;
      p.b(s(State::PipeWater), c(Control::HeatPump)) = 1000.0 * spec.cop_hp / cw;
    }

    // Refrigerator chamber, exchanging with the room air.
    const double crf = spec.cap_fridge;
    p.a(s(State::Fridge), s(State::Fridge)) = -spec.ua_room_fridge / crf;
    p.a(s(State::Fridge), s(State::Room)) = spec.ua_room_fridge / crf;
    p.b(s(State::Fridge), c(Control::Fridge)) = -1000.0 * spec.cop_fridge / crf;

    // Water heater outside the envelope; the draw replaces tank water with
    // inlet water at mass flow draw/period (1 kg per litre).
    const double cwh = spec.cap_waterheater;
    const double draw_conductance = z.hot_water_draw / period_seconds * spec.water_specific_heat;
    p.a(s(State::WaterHeater), s(State::WaterHeater)) =
        -(spec.ua_waterheater_ambient + draw_conductance) / cwh;
    p.b(s(State::WaterHeater), c(Control::WaterHeater)) = 1000.0 * spec.cop_waterheater / cwh;
    p.e(s(State::WaterHeater), amb) = spec.ua_waterheater_ambient / cwh;
    p.e(s(State::WaterHeater), hwd) =
        spec.water_specific_heat * spec.inlet_water_temp / (period_seconds * cwh);

    model.periods.push_back(std::move(p));
  }
  return model;
}

DiscreteModel discretize(const ContinuousModel& continuous, double dt) {
  if (!(dt > 0.0)) throw ModelError("discretization step must be positive");
  const auto n_states = static_cast<Eigen::Index>(active_states(continuous.variant).size());
  const auto n_controls = static_cast<Eigen::Index>(active_controls(continuous.variant).size());

  DiscreteModel model;
  model.variant = continuous.variant;
  model.dt = dt;
  model.a_mats.reserve(continuous.periods.size());
  model.b_mats.reserve(continuous.periods.size());
  model.e_mats.reserve(continuous.periods.size());

  for (std::size_t t = 0; t < continuous.periods.size(); ++t) {
    const auto& p = continuous.periods[t];
    if (p.a.rows() != n_states || p.a.cols() != n_states || p.b.rows() != n_states ||
        p.b.cols() != n_controls || p.e.rows() != n_states ||
        p.e.cols() != static_cast<Eigen::Index>(kInputCount)) {
      throw ModelError("coefficient dimensions do not match the heater variant at period " +
                       std::to_string(t));
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_states, n_states) + dt * p.a;
    for (Eigen::Index i = 0; i < n_states; ++i) {
      if (a(i, i) < 0.0) {
        std::ostringstream msg;
        msg << "period " << t << ": negative diagonal " << a(i, i) << " for state '"
            << to_string(active_states(continuous.variant)[static_cast<std::size_t>(i)])
            << "' (Euler step too long for this time constant)";
        model.diagnostics.push_back(msg.str());
      }
    }
    model.a_mats.push_back(std::move(a));
    model.b_mats.push_back(dt * p.b);
    model.e_mats.push_back(dt * p.e);
  }
  return model;
}

DiscreteModel build_discrete_model(const BuildingSpec& spec, HeaterVariant variant,
                                   std::span<const DisturbanceVector> disturbances, double dt) {
  return discretize(build_continuous_coefficients(spec, variant, disturbances, dt), dt);
}

Eigen::VectorXd input_vector(const DisturbanceVector& z) {
  Eigen::VectorXd v(kInputCount);
  v << z.ambient, z.occupancy, z.hot_water_draw;
  return v;
}

StateVector step(const DiscreteModel& model, std::size_t t, const StateVector& x_prev,
                 const ControlVector& u_prev, const DisturbanceVector& z_prev) {
  if (t >= model.n_steps()) {
    throw ModelError("period " + std::to_string(t) + " outside model horizon of " +
                     std::to_string(model.n_steps()));
  }
  if (!x_prev.matches(model.variant)) {
    throw ModelError("state vector does not match the heater variant");
  }
  const auto states = active_states(model.variant);
  const auto controls = active_controls(model.variant);

  Eigen::VectorXd x(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) x(static_cast<Eigen::Index>(i)) = x_prev[states[i]];
  Eigen::VectorXd u(static_cast<Eigen::Index>(controls.size()));
  for (std::size_t j = 0; j < controls.size(); ++j) u(static_cast<Eigen::Index>(j)) = u_prev[controls[j]];

  const Eigen::VectorXd next =
      model.a_mats[t] * x + model.b_mats[t] * u + model.e_mats[t] * input_vector(z_prev);

  StateVector out;
  for (std::size_t i = 0; i < states.size(); ++i) out.set(states[i], next(static_cast<Eigen::Index>(i)));
  return out;
}

}  // namespace hems
