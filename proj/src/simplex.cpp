// Bounded-variable primal simplex.
//
// Columns 0..n-1 are the structural variables, n..n+m-1 the row logicals
// (row . y + s = rhs, s in [0,0] for equality rows and [0,inf) for <= rows).
// Phase 1 minimizes the sum of bound infeasibilities of the basic variables,
// phase 2 the objective. Pricing is Dantzig's largest reduced cost with a
// Harris two-pass ratio test; after bland_stall_factor * n_vars consecutive
// degenerate pivots both switch to Bland's smallest-index rule until the next
// non-degenerate step. The basis is refactored with a sparse LU every
// refactor_interval pivots and updated in product form in between.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "hems/lp.hpp"

namespace hems::lp {

namespace {

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Eta {
  int row = 0;
  double pivot = 1.0;
  std::vector<int> index;
  std::vector<double> value;  // entries of the FTRAN'd column except the pivot
};

double power_of_two(double x) { return std::exp2(std::round(std::log2(x))); }

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolverOptions& options);
  LpSolution run();

 private:
  enum class Outcome { Optimal, Unbounded, Infeasible, IterationLimit };

  void build(const LinearProgram& lp);
  void scale();
  void crash();
  bool refactor();
  void recompute_primal();
  void reset_to_logical_basis();
  double infeasibility(int j) const;
  double total_infeasibility() const;
  Outcome iterate(bool phase_one);

  template <class F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) f(col_row_[p], col_val_[p]);
    } else {
      f(j - n_, 1.0);
    }
  }

  Eigen::VectorXd ftran(int j) const;
  Eigen::VectorXd btran(Eigen::VectorXd rhs) const;

  const SolverOptions options_;
  int n_ = 0;
  int m_ = 0;
  int m_eq_ = 0;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> rhs_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;

  std::vector<int> head_;  // basic variable per basis position
  std::vector<int> pos_;   // basis position per variable, -1 if nonbasic
  std::vector<VarStatus> status_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;

  int iterations_ = 0;
  int bland_iterations_ = 0;
  int max_iterations_ = 0;
};

Simplex::Simplex(const LinearProgram& lp, const SolverOptions& options) : options_(options) {
  build(lp);
  scale();
  max_iterations_ = options_.max_iterations > 0 ? options_.max_iterations
                                                : 50 * (m_ + n_) + 10000;
}

void Simplex::build(const LinearProgram& lp) {
  n_ = lp.n_vars;
  m_eq_ = static_cast<int>(lp.eq_rows.size());
  m_ = m_eq_ + static_cast<int>(lp.ineq_rows.size());

  // Column-major copy of the row-wise constraint matrix, merging duplicates.
  std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n_));
  rhs_.assign(static_cast<std::size_t>(m_), 0.0);
  auto add_row = [&](const Row& row, int r) {
    rhs_[static_cast<std::size_t>(r)] = row.rhs;
    for (const auto& t : row.terms) {
      auto& col = cols[static_cast<std::size_t>(t.var)];
      if (!col.empty() && col.back().first == r) {
        col.back().second += t.coef;
      } else {
        col.emplace_back(r, t.coef);
      }
    }
  };
  for (int i = 0; i < m_eq_; ++i) add_row(lp.eq_rows[static_cast<std::size_t>(i)], i);
  for (int i = m_eq_; i < m_; ++i) add_row(lp.ineq_rows[static_cast<std::size_t>(i - m_eq_)], i);

  col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) {
    auto& col = cols[static_cast<std::size_t>(j)];
    std::sort(col.begin(), col.end());
    // A variable repeated within one row but not adjacently is merged here.
    std::vector<std::pair<int, double>> merged;
    for (const auto& e : col) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    for (const auto& [r, v] : merged) {
      if (v != 0.0) {
        col_row_.push_back(r);
        col_val_.push_back(v);
      }
    }
    col_start_[static_cast<std::size_t>(j) + 1] = static_cast<int>(col_row_.size());
  }

  const auto total = static_cast<std::size_t>(n_ + m_);
  lo_.assign(total, 0.0);
  up_.assign(total, 0.0);
  cost_.assign(total, 0.0);
  x_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    lo_[static_cast<std::size_t>(j)] = lp.lower_bounds[static_cast<std::size_t>(j)];
    up_[static_cast<std::size_t>(j)] = lp.upper_bounds[static_cast<std::size_t>(j)];
    cost_[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
  }
  for (int i = m_eq_; i < m_; ++i) up_[static_cast<std::size_t>(n_ + i)] = kInf;
}

void Simplex::scale() {
  row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
  col_scale_.assign(static_cast<std::size_t>(n_), 1.0);

  // Geometric-mean passes followed by max-norm equilibration of the rows.
  for (int pass = 0; pass < 6; ++pass) {
    std::vector<double> rmin(static_cast<std::size_t>(m_), kInf), rmax(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        const auto r = static_cast<std::size_t>(col_row_[p]);
        const double v = std::abs(col_val_[p]) * col_scale_[static_cast<std::size_t>(j)];
        rmin[r] = std::min(rmin[r], v);
        rmax[r] = std::max(rmax[r], v);
      }
    }
    for (int i = 0; i < m_; ++i) {
      const auto r = static_cast<std::size_t>(i);
      if (rmax[r] > 0.0) row_scale_[r] = 1.0 / std::sqrt(rmin[r] * rmax[r]);
    }
    for (int j = 0; j < n_; ++j) {
      double cmin = kInf, cmax = 0.0;
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        const double v = std::abs(col_val_[p]) * row_scale_[static_cast<std::size_t>(col_row_[p])];
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
      }
      if (cmax > 0.0) col_scale_[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(cmin * cmax);
    }
  }
  {
    std::vector<double> rmax(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        const auto r = static_cast<std::size_t>(col_row_[p]);
        rmax[r] = std::max(rmax[r], std::abs(col_val_[p]) * col_scale_[static_cast<std::size_t>(j)] *
                                        row_scale_[r]);
      }
    }
    for (int i = 0; i < m_; ++i) {
      const auto r = static_cast<std::size_t>(i);
      if (rmax[r] > 0.0) row_scale_[r] /= rmax[r];
    }
  }
  for (auto& s : row_scale_) s = power_of_two(s);
  for (auto& s : col_scale_) s = power_of_two(s);

  for (int j = 0; j < n_; ++j) {
    const auto c = static_cast<std::size_t>(j);
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      col_val_[p] *= row_scale_[static_cast<std::size_t>(col_row_[p])] * col_scale_[c];
    }
    lo_[c] /= col_scale_[c];
    up_[c] /= col_scale_[c];
    cost_[c] *= col_scale_[c];
  }
  for (int i = 0; i < m_; ++i) rhs_[static_cast<std::size_t>(i)] *= row_scale_[static_cast<std::size_t>(i)];

  // Centre the nonzero cost range on 1 so that cheap energy terms next to
  // large penalties keep reduced costs well above the dual tolerance.
  double cmin = kInf, cmax = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double c = std::abs(cost_[static_cast<std::size_t>(j)]);
    if (c == 0.0) continue;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  obj_scale_ = cmax > 0.0 ? power_of_two(1.0 / std::sqrt(cmin * cmax)) : 1.0;
  for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] *= obj_scale_;
}

// Starts from the logical basis and swaps free structural columns in where
// this keeps the basis triangular: a free column takes an uncovered row and
// then covers every row it touches, so later picks have zeros in it.
void Simplex::crash() {
  head_.resize(static_cast<std::size_t>(m_));
  pos_.assign(static_cast<std::size_t>(n_ + m_), -1);
  status_.assign(static_cast<std::size_t>(n_ + m_), VarStatus::AtLower);
  for (int i = 0; i < m_; ++i) {
    head_[static_cast<std::size_t>(i)] = n_ + i;
    pos_[static_cast<std::size_t>(n_ + i)] = i;
    status_[static_cast<std::size_t>(n_ + i)] = VarStatus::Basic;
  }
  for (int j = 0; j < n_; ++j) {
    const auto c = static_cast<std::size_t>(j);
    if (std::isfinite(lo_[c])) {
      status_[c] = VarStatus::AtLower;
      x_[c] = lo_[c];
    } else if (std::isfinite(up_[c])) {
      status_[c] = VarStatus::AtUpper;
      x_[c] = up_[c];
    } else {
      status_[c] = VarStatus::FreeZero;
      x_[c] = 0.0;
    }
  }

  std::vector<char> covered(static_cast<std::size_t>(m_), 0);
  for (int j = n_ - 1; j >= 0; --j) {
    const auto c = static_cast<std::size_t>(j);
    if (status_[c] != VarStatus::FreeZero) continue;
    double col_max = 0.0;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) col_max = std::max(col_max, std::abs(col_val_[p]));
    int best = -1;
    double best_abs = 0.0;
    bool best_eq = false;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const int r = col_row_[p];
      if (covered[static_cast<std::size_t>(r)]) continue;
      const double a = std::abs(col_val_[p]);
      if (a < 0.1 * col_max) continue;
      const bool eq = r < m_eq_;
      if (best < 0 || (eq && !best_eq) || (eq == best_eq && a > best_abs)) {
        best = r;
        best_abs = a;
        best_eq = eq;
      }
    }
    if (best < 0) continue;
    const int logical = n_ + best;
    head_[static_cast<std::size_t>(best)] = j;
    pos_[c] = best;
    status_[c] = VarStatus::Basic;
    pos_[static_cast<std::size_t>(logical)] = -1;
    status_[static_cast<std::size_t>(logical)] = VarStatus::AtLower;
    x_[static_cast<std::size_t>(logical)] = 0.0;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) covered[static_cast<std::size_t>(col_row_[p])] = 1;
  }
}

bool Simplex::refactor() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < m_; ++k) {
    for_column(head_[static_cast<std::size_t>(k)], [&](int r, double v) { triplets.emplace_back(r, k, v); });
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  return lu_.info() == Eigen::Success;
}

Eigen::VectorXd Simplex::ftran(int j) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
  for_column(j, [&](int r, double v) { a(r) = v; });
  Eigen::VectorXd x = lu_.solve(a);
  for (const auto& eta : etas_) {
    const double xr = x(eta.row) / eta.pivot;
    if (xr != 0.0) {
      for (std::size_t k = 0; k < eta.index.size(); ++k) x(eta.index[k]) -= eta.value[k] * xr;
    }
    x(eta.row) = xr;
  }
  return x;
}

Eigen::VectorXd Simplex::btran(Eigen::VectorXd w) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = w(it->row);
    for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * w(it->index[k]);
    w(it->row) = s / it->pivot;
  }
  return lu_.transpose().solve(w);
}

void Simplex::recompute_primal() {
  if (m_ == 0) return;
  Eigen::VectorXd r(m_);
  for (int i = 0; i < m_; ++i) r(i) = rhs_[static_cast<std::size_t>(i)];
  for (int j = 0; j < n_ + m_; ++j) {
    const auto c = static_cast<std::size_t>(j);
    if (status_[c] == VarStatus::Basic || x_[c] == 0.0) continue;
    for_column(j, [&](int row, double v) { r(row) -= v * x_[c]; });
  }
  const Eigen::VectorXd xb = lu_.solve(r);
  for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] = xb(k);
}

void Simplex::reset_to_logical_basis() {
  for (int k = 0; k < m_; ++k) {
    const int j = head_[static_cast<std::size_t>(k)];
    if (j >= n_) continue;
    const auto c = static_cast<std::size_t>(j);
    pos_[c] = -1;
    if (std::isfinite(lo_[c]) && (!std::isfinite(up_[c]) || x_[c] - lo_[c] <= up_[c] - x_[c])) {
      status_[c] = VarStatus::AtLower;
      x_[c] = lo_[c];
    } else if (std::isfinite(up_[c])) {
      status_[c] = VarStatus::AtUpper;
      x_[c] = up_[c];
    } else {
      status_[c] = VarStatus::FreeZero;
      x_[c] = 0.0;
    }
  }
  for (int i = 0; i < m_; ++i) {
    head_[static_cast<std::size_t>(i)] = n_ + i;
    pos_[static_cast<std::size_t>(n_ + i)] = i;
    status_[static_cast<std::size_t>(n_ + i)] = VarStatus::Basic;
  }
  refactor();
  recompute_primal();
}

double Simplex::infeasibility(int j) const {
  const auto c = static_cast<std::size_t>(j);
  if (x_[c] < lo_[c]) return lo_[c] - x_[c];
  if (x_[c] > up_[c]) return x_[c] - up_[c];
  return 0.0;
}

double Simplex::total_infeasibility() const {
  double sum = 0.0;
  for (int k = 0; k < m_; ++k) {
    const double v = infeasibility(head_[static_cast<std::size_t>(k)]);
    if (v > options_.tolerance) sum += v;
  }
  return sum;
}

Simplex::Outcome Simplex::iterate(bool phase_one) {
  const double tol = options_.tolerance;
  const double dual_tol = tol;
  const double pivot_tol = 1e-9;
  const int stall_limit = std::max(1, options_.bland_stall_factor * std::max(1, n_));
  int degenerate_run = 0;
  bool bland = false;

  Eigen::VectorXd cb(m_);
  std::vector<double> phase_cost(static_cast<std::size_t>(m_), 0.0);

  while (true) {
    if (iterations_ >= max_iterations_) return Outcome::IterationLimit;

    // Basic costs: objective in phase 2, infeasibility gradient in phase 1.
    bool any_infeasible = false;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[static_cast<std::size_t>(k)];
      const auto c = static_cast<std::size_t>(j);
      if (phase_one) {
        double g = 0.0;
        if (x_[c] < lo_[c] - tol) g = -1.0;
        else if (x_[c] > up_[c] + tol) g = 1.0;
        any_infeasible = any_infeasible || g != 0.0;
        cb(k) = g;
      } else {
        cb(k) = cost_[c];
      }
    }
    if (phase_one && !any_infeasible) return Outcome::Optimal;

    const Eigen::VectorXd y = m_ > 0 ? btran(cb) : Eigen::VectorXd();

    // Pricing.
    int entering = -1;
    double best_score = 0.0;
    int direction = 0;
    for (int j = 0; j < n_ + m_; ++j) {
      const auto c = static_cast<std::size_t>(j);
      const VarStatus st = status_[c];
      if (st == VarStatus::Basic || lo_[c] == up_[c]) continue;
      double d = phase_one ? 0.0 : cost_[c];
      for_column(j, [&](int r, double v) { d -= y(r) * v; });
      int dir = 0;
      if (st == VarStatus::AtLower && d < -dual_tol) dir = 1;
      else if (st == VarStatus::AtUpper && d > dual_tol) dir = -1;
      else if (st == VarStatus::FreeZero && std::abs(d) > dual_tol) dir = d < 0.0 ? 1 : -1;
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        direction = dir;
      }
    }
    if (entering < 0) return phase_one ? Outcome::Infeasible : Outcome::Optimal;

    const auto q = static_cast<std::size_t>(entering);
    const Eigen::VectorXd alpha = m_ > 0 ? ftran(entering) : Eigen::VectorXd();

    // Ratio test. Basic k moves by delta_k * theta.
    auto limit_of = [&](int k, double delta, double relax, double& bound) -> double {
      const auto c = static_cast<std::size_t>(head_[static_cast<std::size_t>(k)]);
      const double xv = x_[c];
      if (phase_one && xv < lo_[c] - tol) {
        if (delta > 0.0) {
          bound = lo_[c];
          return (lo_[c] - xv + relax) / delta;
        }
        return kInf;
      }
      if (phase_one && xv > up_[c] + tol) {
        if (delta < 0.0) {
          bound = up_[c];
          return (xv - up_[c] + relax) / -delta;
        }
        return kInf;
      }
      if (delta < 0.0 && std::isfinite(lo_[c])) {
        bound = lo_[c];
        return (xv - lo_[c] + relax) / -delta;
      }
      if (delta > 0.0 && std::isfinite(up_[c])) {
        bound = up_[c];
        return (up_[c] - xv + relax) / delta;
      }
      return kInf;
    };

    int leave = -1;
    double theta = kInf;
    double leave_bound = 0.0;
    if (bland) {
      for (int k = 0; k < m_; ++k) {
        const double delta = -direction * alpha(k);
        if (std::abs(delta) <= pivot_tol) continue;
        double bound = 0.0;
        const double ratio = std::max(0.0, limit_of(k, delta, 0.0, bound));
        if (!std::isfinite(ratio)) continue;
        const bool better = ratio < theta - 1e-12 * std::max(1.0, theta) ||
                            (ratio <= theta + 1e-12 * std::max(1.0, theta) && leave >= 0 &&
                             head_[static_cast<std::size_t>(k)] < head_[static_cast<std::size_t>(leave)]);
        if (leave < 0 || better) {
          leave = k;
          theta = ratio;
          leave_bound = bound;
        }
      }
    } else {
      double theta_max = kInf;
      for (int k = 0; k < m_; ++k) {
        const double delta = -direction * alpha(k);
        if (std::abs(delta) <= pivot_tol) continue;
        double bound = 0.0;
        theta_max = std::min(theta_max, limit_of(k, delta, tol, bound));
      }
      if (std::isfinite(theta_max)) {
        double best_alpha = 0.0;
        for (int k = 0; k < m_; ++k) {
          const double delta = -direction * alpha(k);
          if (std::abs(delta) <= pivot_tol) continue;
          double bound = 0.0;
          const double ratio = limit_of(k, delta, 0.0, bound);
          if (ratio <= theta_max && std::abs(delta) > best_alpha) {
            best_alpha = std::abs(delta);
            leave = k;
            theta = std::max(0.0, ratio);
            leave_bound = bound;
          }
        }
      }
    }

    const double range = up_[q] - lo_[q];
    const bool flip = std::isfinite(range) && (leave < 0 || range <= theta);
    if (leave < 0 && !flip) {
      return phase_one ? Outcome::Infeasible : Outcome::Unbounded;
    }
    if (flip) theta = range;

    ++iterations_;
    if (bland) ++bland_iterations_;

    // Primal update.
    const double step = direction * theta;
    if (theta != 0.0) {
      for (int k = 0; k < m_; ++k) {
        if (alpha(k) != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] -= step * alpha(k);
      }
    }
    x_[q] += step;

    if (theta <= 1e-12) {
      if (++degenerate_run >= stall_limit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (flip) {
      status_[q] = direction > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[q] = direction > 0 ? up_[q] : lo_[q];
      continue;
    }

    const int leaving = head_[static_cast<std::size_t>(leave)];
    const auto l = static_cast<std::size_t>(leaving);
    x_[l] = leave_bound;
    status_[l] = leave_bound == lo_[l] ? VarStatus::AtLower : VarStatus::AtUpper;
    pos_[l] = -1;
    head_[static_cast<std::size_t>(leave)] = entering;
    pos_[q] = leave;
    status_[q] = VarStatus::Basic;

    Eta eta;
    eta.row = leave;
    eta.pivot = alpha(leave);
    for (int k = 0; k < m_; ++k) {
      if (k != leave && std::abs(alpha(k)) > 1e-14) {
        eta.index.push_back(k);
        eta.value.push_back(alpha(k));
      }
    }
    etas_.push_back(std::move(eta));

    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      if (!refactor()) {
        reset_to_logical_basis();
        phase_one = true;
      } else {
        recompute_primal();
      }
      if (!phase_one && total_infeasibility() > 0.0) {
        // Drift after refactoring; let phase 1 restore feasibility first.
        return Outcome::Infeasible;
      }
    }
  }
}

LpSolution Simplex::run() {
  LpSolution solution;
  crash();
  if (!refactor()) reset_to_logical_basis();
  recompute_primal();

  Outcome outcome = Outcome::Infeasible;
  for (int round = 0; round < 4; ++round) {
    outcome = iterate(/*phase_one=*/true);
    if (outcome == Outcome::IterationLimit) break;
    if (outcome == Outcome::Infeasible) {
      if (total_infeasibility() > 0.0) break;
    }
    outcome = iterate(/*phase_one=*/false);
    if (outcome == Outcome::IterationLimit || outcome == Outcome::Unbounded) break;
    if (outcome == Outcome::Infeasible) continue;  // drift detected, back to phase 1
    if (refactor()) recompute_primal();
    if (total_infeasibility() == 0.0) break;
    outcome = Outcome::Infeasible;
  }

  solution.iterations = iterations_;
  solution.bland_iterations = bland_iterations_;
  switch (outcome) {
    case Outcome::Optimal: solution.status = Status::Optimal; break;
    case Outcome::Unbounded: solution.status = Status::Unbounded; break;
    case Outcome::Infeasible: solution.status = Status::Infeasible; break;
    case Outcome::IterationLimit: solution.status = Status::IterationLimit; break;
  }
  solution.primal.resize(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    const auto c = static_cast<std::size_t>(j);
    solution.primal[c] = x_[c] * col_scale_[c];
  }
  return solution;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverOptions& options) {
  lp.validate();
  if (options.refactor_interval < 1) throw LpError("refactor interval must be positive");
  Simplex simplex(lp, options);
  LpSolution solution = simplex.run();
  double objective = 0.0;
  for (std::size_t j = 0; j < solution.primal.size(); ++j) objective += lp.objective[j] * solution.primal[j];
  solution.objective_value = objective;
  return solution;
}

}  // namespace hems::lp
