#pragma once

// Lumped RC thermal model of a single-zone household: continuous heat-balance
// coefficients for both space-heating variants, forward-Euler discretization
// and one-step propagation x_t = A_t x_{t-1} + B_t u_{t-1} + E_t z_{t-1}.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hems {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class HeaterVariant { FloorHeating, Hvac };

std::string_view to_string(HeaterVariant variant);
HeaterVariant parse_heater_variant(std::string_view text);

enum class State : int { Room = 0, Floor, PipeWater, Fridge, WaterHeater };
inline constexpr std::size_t kStateCount = 5;

// Order follows the control vector of the household model.
enum class Control : int { HeatPump = 0, Heat, Cool, Light, Blind, Fridge, WaterHeater };
inline constexpr std::size_t kControlCount = 7;

// Disturbances that enter through E: ambient, occupancy, hot-water draw.
enum class Input : int { Ambient = 0, Occupancy, HotWater };
inline constexpr std::size_t kInputCount = 3;

std::string_view to_string(State state);
std::string_view to_string(Control control);

std::span<const State> active_states(HeaterVariant variant);
std::span<const Control> active_controls(HeaterVariant variant);

/// Index of `state` within the active state set of `variant`, or nullopt.
std::optional<std::size_t> state_slot(HeaterVariant variant, State state);
std::optional<std::size_t> control_slot(HeaterVariant variant, Control control);

/// Physical parameters of the household. Internal units are SI (W, J/degC,
/// s); device power limits are in kW because controls are expressed in kW.
struct BuildingSpec {
  // Heat-transfer coefficients [W/degC].
  double ua_room_ambient = 50.0;
  double ua_floor_room = 624.0;
  double ua_water_floor = 100.0;
  double ua_room_fridge = 0.678;
  double ua_waterheater_ambient = 0.5;

  // Thermal capacities [J/degC].
  double cap_room = 810.0e3;
  double cap_floor = 3315.0e3;
  double cap_pipewater = 400.0 * 4186.0;
  double cap_fridge = 6.65 * 3600.0;
  double cap_waterheater = 34.85 * 3600.0;

  double cop_hp = 3.0;
  double cop_heat = 1.67;
  double cop_cool = 3.67;
  double cop_fridge = 0.76;
  double cop_waterheater = 0.92;

  // Electrical capacities [kW].
  double pmax_hp = 1.0;
  double pmax_heat = 1.0;
  double pmax_cool = 1.0;
  double pmax_wh = 1.26;
  double pmax_rf = 0.35;
  double pmax_al = 0.06;

  double floor_area = 30.0;               // m2
  double window_area = 1.0;               // m2
  double solar_transmittance_split = 1.0;  // share of window gain to the room node
  double internal_gain_per_occupancy = 0.1;  // kW per unit occupancy
  double water_specific_heat = 4186.0;       // J/(kg degC)
  double inlet_water_temp = 10.0;            // degC
  double lum_efficacy_indoor = 90.0e3;       // lumen/kW
  double lum_efficacy_daylight = 105.0;      // lumen/W

  /// Throws ModelError naming the first offending field.
  void validate() const;

  /// Upper power bound of a control in kW (1 for the blind, in p.u.).
  double upper_bound(Control control) const;

  bool operator==(const BuildingSpec&) const = default;
};

/// Temperatures [degC]. Entries outside the variant's active set are disabled.
class StateVector {
 public:
  StateVector() = default;

  /// All five entries; the floor and pipe-water entries are dropped for Hvac.
  static StateVector make(HeaterVariant variant, double room, double floor, double pipe_water,
                          double fridge, double water_heater);

  bool active(State state) const { return values_[index(state)].has_value(); }
  double operator[](State state) const;
  void set(State state, double value) { values_[index(state)] = value; }
  void disable(State state) { values_[index(state)].reset(); }

  /// True when the active mask equals the active state set of `variant`.
  bool matches(HeaterVariant variant) const;

  bool operator==(const StateVector&) const = default;

 private:
  static std::size_t index(State state) { return static_cast<std::size_t>(state); }
  std::array<std::optional<double>, kStateCount> values_{};
};

/// Electrical powers [kW] and blind position [p.u.].
struct ControlVector {
  double hp = 0.0;
  double heat = 0.0;
  double cool = 0.0;
  double al = 0.0;
  double blind = 0.0;
  double rf = 0.0;
  double wh = 0.0;

  double& operator[](Control control);
  double operator[](Control control) const;

  /// Sum of the power entries (every control except the blind).
  double electrical_kw() const;

  bool operator==(const ControlVector&) const = default;
};

struct DisturbanceVector {
  double ambient = 0.0;            // degC
  double occupancy = 0.0;          // >= 0
  double hot_water_draw = 0.0;     // litres over the period
  double solar_illuminance = 0.0;  // lumen at the window
  double standby = 0.0;            // kW

  void validate() const;
};

/// Window solar illuminance [lumen] from global irradiance [W/m2].
double solar_illuminance(double irradiance, double window_area, double daylight_efficacy);

struct PeriodCoefficients {
  Eigen::MatrixXd a;  // active states x active states
  Eigen::MatrixXd b;  // active states x active controls
  Eigen::MatrixXd e;  // active states x kInputCount
};

struct ContinuousModel {
  HeaterVariant variant = HeaterVariant::FloorHeating;
  double period_seconds = 900.0;
  std::vector<PeriodCoefficients> periods;
};

struct DiscreteModel {
  HeaterVariant variant = HeaterVariant::FloorHeating;
  double dt = 900.0;
  std::vector<Eigen::MatrixXd> a_mats;
  std::vector<Eigen::MatrixXd> b_mats;
  std::vector<Eigen::MatrixXd> e_mats;
  std::vector<std::string> diagnostics;

  std::size_t n_steps() const { return a_mats.size(); }
};

/// Per-period continuous heat-balance coefficients. `period_seconds` converts
/// the per-period hot-water draw into a mass flow.
ContinuousModel build_continuous_coefficients(const BuildingSpec& spec, HeaterVariant variant,
                                              std::span<const DisturbanceVector> disturbances,
                                              double period_seconds);

/// Forward Euler: A_d = I + dt A, B_d = dt B, E_d = dt E. Negative diagonal
/// entries of A_d are reported in DiscreteModel::diagnostics.
DiscreteModel discretize(const ContinuousModel& continuous, double dt);

/// build_continuous_coefficients followed by discretize with the same step.
DiscreteModel build_discrete_model(const BuildingSpec& spec, HeaterVariant variant,
                                   std::span<const DisturbanceVector> disturbances, double dt);

Eigen::VectorXd input_vector(const DisturbanceVector& z);

/// Exact affine propagation through period `t`; no clamping.
StateVector step(const DiscreteModel& model, std::size_t t, const StateVector& x_prev,
                 const ControlVector& u_prev, const DisturbanceVector& z_prev);

}  // namespace hems
