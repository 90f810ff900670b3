#pragma once

// Linear programs with equality rows, <= rows and two-sided variable bounds,
// solved by a bounded-variable primal simplex.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hems::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class LpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  double rhs = 0.0;
  std::string name;
};

struct LinearProgram {
  int n_vars = 0;
  std::vector<double> objective;
  std::vector<Row> eq_rows;    // terms . y == rhs
  std::vector<Row> ineq_rows;  // terms . y <= rhs
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
  std::vector<std::string> names;  // empty, or one label per variable

  int add_variable(double lower, double upper, double cost, std::string name = {});
  void add_equality(std::vector<Term> terms, double rhs, std::string name = {});
  void add_less_equal(std::vector<Term> terms, double rhs, std::string name = {});
  void add_greater_equal(std::vector<Term> terms, double rhs, std::string name = {});

  std::size_t row_count() const { return eq_rows.size() + ineq_rows.size(); }

  /// Throws LpError on dimension mismatch, crossed bounds, non-finite
  /// coefficients or out-of-range variable indices.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status status);

struct LpSolution {
  Status status = Status::Infeasible;
  double objective_value = 0.0;
  std::vector<double> primal;
  int iterations = 0;
  int bland_iterations = 0;
};

struct SolverOptions {
  /// 0 selects 50 * (rows + columns) + 10000.
  int max_iterations = 0;
  int refactor_interval = 100;
  /// Consecutive degenerate pivots, as a multiple of n_vars, before Bland's
  /// rule takes over pricing and the ratio test.
  int bland_stall_factor = 5;
  /// Internal primal/dual tolerance on the scaled problem.
  double tolerance = 1e-9;
};

LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

enum class ViolationKind { Equality, Inequality, LowerBound, UpperBound };

struct Violation {
  ViolationKind kind = ViolationKind::Equality;
  std::size_t index = 0;  // row index within its kind, or variable index
  double magnitude = 0.0;
};

struct VerifyReport {
  double max_violation = 0.0;
  double objective = 0.0;
  std::vector<Violation> violations;  // entries above the tolerance

  bool feasible() const { return violations.empty(); }
};

/// Pure feasibility and objective check of a candidate point.
VerifyReport verify(const LinearProgram& lp, std::span<const double> candidate, double tol = 1e-7);

/// CPLEX LP text format: Minimize / Subject To / Bounds / End. Variables are
/// named by their labels when every label is a valid, unique LP identifier,
/// otherwise v{index}.
void write_lp_format(const LinearProgram& lp, std::ostream& out);
std::vector<std::string> lp_format_names(const LinearProgram& lp);

}  // namespace hems::lp
