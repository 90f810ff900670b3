#pragma once

// Independent reference computations used by the validation suites and the
// test binaries. Nothing here calls into the simplex or the schedulers it is
// used to check.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hems/lp.hpp"
#include "hems/mpc.hpp"

namespace hems::oracle {

struct VertexResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> point;
  std::size_t vertices_checked = 0;
};

/// Exhaustive basic-solution enumeration. Every variable must have finite
/// bounds; intended for n_vars <= 8 and at most 8 inequality rows.
VertexResult enumerate_vertices(const lp::LinearProgram& lp, double tol = 1e-9);

struct RandomLpOptions {
  int max_vars = 8;
  int max_rows = 8;
  /// Probability that the right-hand sides are drawn without a feasible anchor.
  double unanchored_probability = 0.15;
};

/// Random LP with finite bounds on every variable.
lp::LinearProgram random_lp(std::uint64_t seed, const RandomLpOptions& options = {});

/// Start/cost by evaluating every start against a full power vector.
mpc::LoadSchedule brute_force_schedule(const mpc::UninterruptibleLoad& load,
                                       std::span<const double> prices, double dt_hours);

mpc::UninterruptibleLoad random_load(std::uint64_t seed, std::size_t horizon_len,
                                     std::vector<double>& prices);

/// Small HVAC horizon problem with random prices/weather and `n_loads`
/// uninterruptible loads, each with `starts_per_load` feasible starts.
mpc::HorizonProblem random_horizon_problem(std::uint64_t seed, std::size_t horizon_len,
                                           std::size_t n_loads, std::size_t starts_per_load);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  std::string detail;
};

SuiteResult run_lp_vertex_suite(std::uint64_t seed, std::size_t count);
SuiteResult run_schedule_suite(std::uint64_t seed, std::size_t count);
SuiteResult run_decomposition_suite(std::uint64_t seed, std::size_t count);

}  // namespace hems::oracle
