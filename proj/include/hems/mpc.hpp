#pragma once

// One receding-horizon instance of the household problem: comfort bounds,
// uninterruptible-load scheduling, LP assembly of the continuous part and
// recomposition of the solved plan.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hems/lp.hpp"
#include "hems/model_core.hpp"

namespace hems::mpc {

class MpcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFeasibleStart : public MpcError {
 public:
  using MpcError::MpcError;
};

enum class BoundStrategy { PriceIndependent, PriceDependent };
enum class Flexibility { NoFlex, Flex, ExtraFlex };

std::string_view to_string(BoundStrategy strategy);  // "PI-CB" / "PD-CB"
std::string_view to_string(Flexibility flexibility);  // "noflex" / "flex" / "extraflex"
BoundStrategy parse_bound_strategy(std::string_view text);
Flexibility parse_flexibility(std::string_view text);

struct Band {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const Band&) const = default;
};

struct ComfortProfile {
  double room_setpoint = 20.0;  // degC
  double alpha = 0.0;           // degC
  BoundStrategy bound_strategy = BoundStrategy::PriceIndependent;
  Band wh_bounds{54.0, 56.0};
  Band rf_bounds{4.9, 5.1};
  Band light_bounds_lux{100.0, 10000.0};
  double blind_min = 0.0;
  double rho_temp = 1000.0;   // EUR per degC and period
  double rho_light = 1000.0;  // EUR per lumen and period
  Flexibility flexibility_label = Flexibility::NoFlex;

  /// Setpoint, alpha and appliance bands of the noflex/flex/extraflex cases.
  static ComfortProfile preset(Flexibility flexibility, BoundStrategy strategy);
  void validate() const;
  bool operator==(const ComfortProfile&) const = default;
};

struct RoomBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Room temperature band per period. Under PD-CB the weights are the prices
/// min-max normalized within each calendar day of the horizon (a day with a
/// flat price gets weight 1). `periods_per_day` = 0 treats the whole horizon
/// as one day; `first_period_offset` is the period-of-day of element 0.
RoomBounds build_comfort_bounds(const ComfortProfile& profile, std::span<const double> prices,
                                std::size_t horizon_len, std::size_t periods_per_day = 0,
                                std::size_t first_period_offset = 0);

struct UninterruptibleLoad {
  std::string name;
  std::vector<double> cycle_phases;  // kW per phase, one phase per period
  std::vector<std::size_t> window;   // permitted periods, horizon-relative

  std::size_t cycle_len() const { return cycle_phases.size(); }
  /// Starts s with s..s+cycle_len-1 all permitted and inside the horizon.
  std::vector<std::size_t> feasible_starts(std::size_t horizon_len) const;
  void validate() const;
};

struct LoadSchedule {
  std::string name;
  std::size_t start = 0;
  std::vector<double> power;  // kW per horizon period
  double cost = 0.0;          // EUR
};

/// Cheapest start by enumeration; equal costs (to 1e-12 relative) resolve to
/// the earliest start. Throws NoFeasibleStart.
LoadSchedule schedule_uninterruptible(const UninterruptibleLoad& load, std::span<const double> prices,
                                      double dt_hours);

struct HorizonProblem {
  BuildingSpec building;
  DiscreteModel model;
  StateVector x0;
  std::vector<double> prices;  // EUR/kWh
  std::vector<DisturbanceVector> disturbances;
  ComfortProfile comfort;
  std::vector<bool> occupied;
  std::vector<UninterruptibleLoad> loads;
  std::size_t horizon_len = 0;
  std::size_t periods_per_day = 0;
  std::size_t first_period_offset = 0;
  bool lighting_enabled = true;

  HeaterVariant variant() const { return model.variant; }
  double dt_hours() const { return model.dt / 3600.0; }
  void validate() const;
};

/// Builds the discrete model from the disturbances and derives the occupied
/// set as {t : occupancy_t > 0}.
HorizonProblem make_horizon_problem(const BuildingSpec& building, HeaterVariant variant,
                                    const StateVector& x0, std::vector<double> prices,
                                    std::vector<DisturbanceVector> disturbances,
                                    const ComfortProfile& comfort,
                                    std::vector<UninterruptibleLoad> loads, double dt,
                                    std::size_t periods_per_day, std::size_t first_period_offset = 0,
                                    bool lighting_enabled = true);

enum class Formulation {
  Sparse,     // states kept as free variables, dynamics as equality rows
  Condensed,  // states substituted out by forward recursion
};

inline constexpr int kNoVar = -1;

struct PeriodVars {
  std::array<int, kControlCount> control{kNoVar, kNoVar, kNoVar, kNoVar, kNoVar, kNoVar, kNoVar};
  std::array<int, kStateCount> state{kNoVar, kNoVar, kNoVar, kNoVar, kNoVar};  // sparse only
  int v_room = kNoVar;
  int v_waterheater = kNoVar;
  int v_fridge = kNoVar;
  int v_light = kNoVar;
  int light = kNoVar;
};

struct AssembledLp {
  lp::LinearProgram lp;
  std::vector<PeriodVars> vars;
  RoomBounds room_bounds;
  Formulation formulation = Formulation::Sparse;
};

AssembledLp assemble_lp(const HorizonProblem& problem, Formulation formulation = Formulation::Sparse);

struct Slacks {
  double room = 0.0;
  double waterheater = 0.0;
  double fridge = 0.0;
  double light = 0.0;
};

/// Solved horizon. Index t refers to period t: controls act during it and
/// states[t] is the temperature at its end.
struct DayPlan {
  std::vector<StateVector> states;
  std::vector<ControlVector> controls;
  std::vector<Slacks> slacks;
  std::vector<double> light;  // lumen
  std::vector<LoadSchedule> loads;
  std::vector<double> load_power;      // sum over uninterruptible loads, kW
  std::vector<double> building_power;  // kW
  RoomBounds room_bounds;
  double electricity_cost = 0.0;
  double penalty_cost = 0.0;
  double lp_objective = 0.0;
  int lp_iterations = 0;

  double total_cost() const { return electricity_cost + penalty_cost; }
};

/// u^b = sum of device powers + uninterruptible loads + standby, always
/// evaluated in this order.
double building_power(const ControlVector& u, double load_power, double standby);

struct SolveOptions {
  Formulation formulation = Formulation::Sparse;
  lp::SolverOptions lp;
};

DayPlan solve_horizon(const HorizonProblem& problem, const SolveOptions& options = {});

/// Enumerates every joint combination of load starts on top of one LP solve
/// and returns the cheapest. Throws MpcError above `combination_cap`.
DayPlan joint_oracle(const HorizonProblem& problem, const SolveOptions& options = {},
                     std::size_t combination_cap = 1'000'000);

/// States obtained by stepping the model from x0 under the given controls.
std::vector<StateVector> replay(const DiscreteModel& model, const StateVector& x0,
                                std::span<const ControlVector> controls,
                                std::span<const DisturbanceVector> disturbances);

}  // namespace hems::mpc
