#include <algorithm>
#include <cmath>

#include "hems/lp.hpp"

namespace hems::lp {

int LinearProgram::add_variable(double lower, double upper, double cost, std::string name) {
  const int index = n_vars++;
  objective.push_back(cost);
  lower_bounds.push_back(lower);
  upper_bounds.push_back(upper);
  if (!name.empty() || !names.empty()) {
    names.resize(static_cast<std::size_t>(index));
    names.push_back(std::move(name));
  }
  return index;
}

void LinearProgram::add_equality(std::vector<Term> terms, double rhs, std::string name) {
  eq_rows.push_back(Row{std::move(terms), rhs, std::move(name)});
}

void LinearProgram::add_less_equal(std::vector<Term> terms, double rhs, std::string name) {
  ineq_rows.push_back(Row{std::move(terms), rhs, std::move(name)});
}

void LinearProgram::add_greater_equal(std::vector<Term> terms, double rhs, std::string name) {
  for (auto& t : terms) t.coef = -t.coef;
  ineq_rows.push_back(Row{std::move(terms), -rhs, std::move(name)});
}

void LinearProgram::validate() const {
  const auto n = static_cast<std::size_t>(n_vars);
  if (n_vars < 0) throw LpError("negative variable count");
  if (objective.size() != n || lower_bounds.size() != n || upper_bounds.size() != n) {
    throw LpError("objective/bound vectors do not match n_vars");
  }
  if (!names.empty() && names.size() != n) throw LpError("names must be empty or one per variable");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw LpError("non-finite objective coefficient");
    if (std::isnan(lower_bounds[j]) || std::isnan(upper_bounds[j])) throw LpError("NaN bound");
    if (lower_bounds[j] > upper_bounds[j]) {
      throw LpError("lower bound exceeds upper bound for variable " + std::to_string(j));
    }
    if (lower_bounds[j] == kInf || upper_bounds[j] == -kInf) {
      throw LpError("variable " + std::to_string(j) + " has an empty domain");
    }
  }
  auto check_rows = [&](const std::vector<Row>& rows) {
    for (const auto& row : rows) {
      if (!std::isfinite(row.rhs)) throw LpError("non-finite right-hand side");
      for (const auto& t : row.terms) {
        if (t.var < 0 || t.var >= n_vars) throw LpError("row references unknown variable");
        if (!std::isfinite(t.coef)) throw LpError("non-finite row coefficient");
      }
    }
  };
  check_rows(eq_rows);
  check_rows(ineq_rows);
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "?";
}

VerifyReport verify(const LinearProgram& lp, std::span<const double> candidate, double tol) {
  lp.validate();
  if (candidate.size() != static_cast<std::size_t>(lp.n_vars)) {
    throw LpError("candidate length does not match n_vars");
  }
  VerifyReport report;
  auto record = [&](ViolationKind kind, std::size_t index, double magnitude, double scale) {
    const double relative = magnitude / scale;
    report.max_violation = std::max(report.max_violation, relative);
    if (relative > tol) report.violations.push_back({kind, index, magnitude});
  };

  for (std::size_t j = 0; j < candidate.size(); ++j) {
    const double y = candidate[j];
    report.objective += lp.objective[j] * y;
    if (y < lp.lower_bounds[j]) {
      record(ViolationKind::LowerBound, j, lp.lower_bounds[j] - y,
             std::max(1.0, std::abs(lp.lower_bounds[j])));
    }
    if (y > lp.upper_bounds[j]) {
      record(ViolationKind::UpperBound, j, y - lp.upper_bounds[j],
             std::max(1.0, std::abs(lp.upper_bounds[j])));
    }
  }
  // Row residuals are measured relative to the largest of 1, |rhs| and the
  // largest single term, which is the scale at which the row is evaluated.
  auto activity = [&](const Row& row, double& scale) {
    double sum = 0.0;
    scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& t : row.terms) {
      const double term = t.coef * candidate[static_cast<std::size_t>(t.var)];
      sum += term;
      scale = std::max(scale, std::abs(term));
    }
    return sum;
  };
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
    double scale = 1.0;
    const double residual = std::abs(activity(lp.eq_rows[i], scale) - lp.eq_rows[i].rhs);
    if (residual > 0.0) record(ViolationKind::Equality, i, residual, scale);
  }
  for (std::size_t i = 0; i < lp.ineq_rows.size(); ++i) {
    double scale = 1.0;
    const double excess = activity(lp.ineq_rows[i], scale) - lp.ineq_rows[i].rhs;
    if (excess > 0.0) record(ViolationKind::Inequality, i, excess, scale);
  }
  return report;
}

}  // namespace hems::lp
