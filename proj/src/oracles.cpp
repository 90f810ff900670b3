#include "hems/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hems::oracle {

namespace {

using Dense = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting on a square system. Returns
// false when the matrix is numerically singular.
bool solve_square(Dense a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (const double v : row) scale = std::max(scale, std::abs(v));
  }
  const double tiny = 1e-11 * std::max(1.0, scale);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= tiny) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return true;
}

std::vector<double> dense_row(const lp::Row& row, int n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (const auto& t : row.terms) out[static_cast<std::size_t>(t.var)] += t.coef;
  return out;
}

// Row-reduces the equality system and keeps an independent subset (with its
// right-hand sides). Returns false when the rows are inconsistent.
bool independent_rows(Dense& rows, std::vector<double>& rhs) {
  Dense work = rows;
  std::vector<double> b = rhs;
  std::vector<std::size_t> keep;
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < work.size(); ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < work.size(); ++r) {
      if (std::abs(work[r][col]) > std::abs(work[pivot][col])) pivot = r;
    }
    if (std::abs(work[pivot][col]) <= 1e-11) continue;
    std::swap(work[pivot], work[rank]);
    std::swap(b[pivot], b[rank]);
    std::swap(order[pivot], order[rank]);
    for (std::size_t r = rank + 1; r < work.size(); ++r) {
      const double f = work[r][col] / work[rank][col];
      for (std::size_t c = col; c < n; ++c) work[r][c] -= f * work[rank][c];
      b[r] -= f * b[rank];
    }
    ++rank;
  }
  for (std::size_t r = rank; r < work.size(); ++r) {
    if (std::abs(b[r]) > 1e-9 * std::max(1.0, std::abs(rhs[order[r]]))) return false;
  }
  Dense kept_rows;
  std::vector<double> kept_rhs;
  for (std::size_t r = 0; r < rank; ++r) {
    kept_rows.push_back(rows[order[r]]);
    kept_rhs.push_back(rhs[order[r]]);
  }
  rows = std::move(kept_rows);
  rhs = std::move(kept_rhs);
  return true;
}

bool feasible_point(const lp::LinearProgram& lp, const std::vector<double>& x, double tol) {
  for (int j = 0; j < lp.n_vars; ++j) {
    const auto c = static_cast<std::size_t>(j);
    const double slack = tol * std::max(1.0, std::abs(x[c]));
    if (x[c] < lp.lower_bounds[c] - slack || x[c] > lp.upper_bounds[c] + slack) return false;
  }
  auto activity = [&](const lp::Row& row, double& mag) {
    double s = 0.0;
    mag = std::abs(row.rhs);
    for (const auto& t : row.terms) {
      s += t.coef * x[static_cast<std::size_t>(t.var)];
      mag = std::max(mag, std::abs(t.coef * x[static_cast<std::size_t>(t.var)]));
    }
    return s;
  };
  for (const auto& row : lp.eq_rows) {
    double mag = 0.0;
    if (std::abs(activity(row, mag) - row.rhs) > tol * std::max(1.0, mag)) return false;
  }
  for (const auto& row : lp.ineq_rows) {
    double mag = 0.0;
    if (activity(row, mag) - row.rhs > tol * std::max(1.0, mag)) return false;
  }
  return true;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

VertexResult enumerate_vertices(const lp::LinearProgram& lp, double tol) {
  lp.validate();
  const int n = lp.n_vars;
  for (int j = 0; j < n; ++j) {
    const auto c = static_cast<std::size_t>(j);
    if (!std::isfinite(lp.lower_bounds[c]) || !std::isfinite(lp.upper_bounds[c])) {
      throw lp::LpError("vertex enumeration needs finite bounds on every variable");
    }
  }
  Dense eq;
  std::vector<double> eq_rhs;
  for (const auto& r : lp.eq_rows) {
    eq.push_back(dense_row(r, n));
    eq_rhs.push_back(r.rhs);
  }
  VertexResult result;
  if (!independent_rows(eq, eq_rhs)) return result;
  Dense le;
  for (const auto& r : lp.ineq_rows) le.push_back(dense_row(r, n));
  const std::size_t n_eq = eq.size();
  const std::size_t n_le = le.size();

  result.objective = std::numeric_limits<double>::infinity();

  // Each variable is at its lower bound (0), at its upper bound (1) or
  // determined by the active rows (2).
  std::vector<int> pattern(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    std::vector<std::size_t> free_vars;
    for (int j = 0; j < n; ++j) {
      const auto c = static_cast<std::size_t>(j);
      if (pattern[c] == 2) free_vars.push_back(c);
      else x[c] = pattern[c] == 0 ? lp.lower_bounds[c] : lp.upper_bounds[c];
    }
    const std::size_t k = free_vars.size();
    if (k >= n_eq && k - n_eq <= n_le) {
      const std::size_t pick = k - n_eq;
      // All subsets of `pick` inequality rows, by lexicographic index lists.
      std::vector<std::size_t> subset(pick);
      for (std::size_t i = 0; i < pick; ++i) subset[i] = i;
      while (true) {
        Dense a;
        std::vector<double> b;
        auto push = [&](const std::vector<double>& row, double rhs) {
          std::vector<double> reduced(k);
          double r = rhs;
          for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
            if (pattern[j] == 2) continue;
            r -= row[j] * x[j];
          }
          for (std::size_t f = 0; f < k; ++f) reduced[f] = row[free_vars[f]];
          a.push_back(std::move(reduced));
          b.push_back(r);
        };
        for (std::size_t i = 0; i < n_eq; ++i) push(eq[i], eq_rhs[i]);
        for (const auto i : subset) push(le[i], lp.ineq_rows[i].rhs);

        std::vector<double> sol;
        const bool ok = k == 0 ? true : solve_square(a, b, sol);
        if (ok) {
          std::vector<double> point = x;
          for (std::size_t f = 0; f < k; ++f) point[free_vars[f]] = sol[f];
          ++result.vertices_checked;
          if (feasible_point(lp, point, tol)) {
            double obj = 0.0;
            for (std::size_t j = 0; j < point.size(); ++j) obj += lp.objective[j] * point[j];
            if (!result.feasible || obj < result.objective) {
              result.feasible = true;
              result.objective = obj;
              result.point = point;
            }
          }
        }
        // Next subset.
        std::size_t i = pick;
        while (i > 0 && subset[i - 1] == n_le - pick + i - 1) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t q = i; q < pick; ++q) subset[q] = subset[q - 1] + 1;
      }
    }
    std::size_t j = 0;
    while (j < pattern.size() && ++pattern[j] == 3) pattern[j++] = 0;
    if (j == pattern.size()) break;
  }
  if (!result.feasible) result.objective = 0.0;
  return result;
}

lp::LinearProgram random_lp(std::uint64_t seed, const RandomLpOptions& options) {
  std::mt19937_64 rng(seed);
  lp::LinearProgram lp;
  const int n = uniform_int(rng, 1, options.max_vars);
  const int rows = uniform_int(rng, 0, options.max_rows);
  const int n_eq = uniform_int(rng, 0, std::min(rows, std::max(0, n - 1)));

  std::vector<double> anchor(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double lo = std::round(uniform(rng, -5.0, 5.0) * 4.0) / 4.0;
    const double width = uniform(rng, 0.0, 1.0) < 0.05 ? 0.0 : std::round(uniform(rng, 0.25, 10.0) * 4.0) / 4.0;
    const double cost = std::round(uniform(rng, -10.0, 10.0) * 2.0) / 2.0;
    lp.add_variable(lo, lo + width, cost);
    anchor[static_cast<std::size_t>(j)] = lo + uniform(rng, 0.0, 1.0) * width;
  }
  const bool anchored = uniform(rng, 0.0, 1.0) >= options.unanchored_probability;
  for (int i = 0; i < rows; ++i) {
    std::vector<lp::Term> terms;
    double at_anchor = 0.0;
    for (int j = 0; j < n; ++j) {
      if (uniform(rng, 0.0, 1.0) < 0.35) continue;
      const double coef = static_cast<double>(uniform_int(rng, -6, 6));
      if (coef == 0.0) continue;
      terms.push_back({j, coef});
      at_anchor += coef * anchor[static_cast<std::size_t>(j)];
    }
    if (terms.empty()) {
      terms.push_back({uniform_int(rng, 0, n - 1), 1.0});
      at_anchor = anchor[static_cast<std::size_t>(terms.back().var)];
    }
    if (i < n_eq) {
      lp.add_equality(terms, anchored ? at_anchor : uniform(rng, -20.0, 20.0));
    } else {
      lp.add_less_equal(terms, anchored ? at_anchor + uniform(rng, 0.0, 5.0) : uniform(rng, -20.0, 20.0));
    }
  }
  return lp;
}

mpc::LoadSchedule brute_force_schedule(const mpc::UninterruptibleLoad& load, std::span<const double> prices,
                                       double dt_hours) {
  const std::size_t horizon = prices.size();
  const std::size_t len = load.cycle_phases.size();
  std::vector<bool> permitted(horizon, false);
  for (const auto t : load.window) {
    if (t < horizon) permitted[t] = true;
  }
  mpc::LoadSchedule best;
  best.name = load.name;
  bool found = false;
  for (std::size_t s = 0; s + len <= horizon; ++s) {
    bool ok = true;
    for (std::size_t c = 0; c < len; ++c) ok = ok && permitted[s + c];
    if (!ok) continue;
    std::vector<double> power(horizon, 0.0);
    for (std::size_t c = 0; c < len; ++c) power[s + c] = load.cycle_phases[c];
    double cost = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) cost += prices[t] * power[t];
    cost *= dt_hours;
    const bool better = !found || cost < best.cost - 1e-12 * std::max(1.0, std::abs(best.cost));
    if (better) {
      found = true;
      best.start = s;
      best.cost = cost;
      best.power = std::move(power);
    }
  }
  if (!found) throw mpc::NoFeasibleStart("brute force: no feasible start for '" + load.name + "'");
  return best;
}

mpc::UninterruptibleLoad random_load(std::uint64_t seed, std::size_t horizon_len, std::vector<double>& prices) {
  std::mt19937_64 rng(seed);
  prices.resize(horizon_len);
  // Prices on a coarse grid so that equal-cost starts occur regularly.
  for (auto& p : prices) p = 0.05 * uniform_int(rng, 0, 8);
  mpc::UninterruptibleLoad load;
  load.name = "load" + std::to_string(seed);
  const int phases = uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(6, horizon_len)));
  for (int c = 0; c < phases; ++c) load.cycle_phases.push_back(0.25 * uniform_int(rng, 0, 8));
  // One guaranteed run plus random extra permitted periods.
  const auto len = static_cast<std::size_t>(phases);
  const std::size_t run_start = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(horizon_len - len)));
  for (std::size_t t = 0; t < horizon_len; ++t) {
    const bool in_run = t >= run_start && t < run_start + len;
    if (in_run || uniform(rng, 0.0, 1.0) < 0.6) load.window.push_back(t);
  }
  return load;
}

mpc::HorizonProblem random_horizon_problem(std::uint64_t seed, std::size_t horizon_len, std::size_t n_loads,
                                           std::size_t starts_per_load) {
  std::mt19937_64 rng(seed);
  BuildingSpec building;
  std::vector<double> prices(horizon_len);
  std::vector<DisturbanceVector> dist(horizon_len);
  const double base_ambient = uniform(rng, -5.0, 15.0);
  for (std::size_t t = 0; t < horizon_len; ++t) {
    prices[t] = std::round(uniform(rng, 0.02, 0.4) * 1000.0) / 1000.0;
    dist[t].ambient = base_ambient + uniform(rng, -2.0, 2.0);
    dist[t].occupancy = uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : 0.0;
    dist[t].hot_water_draw = uniform(rng, 0.0, 1.0) < 0.2 ? uniform(rng, 0.0, 20.0) : 0.0;
    dist[t].solar_illuminance = uniform(rng, 0.0, 1.0) < 0.5 ? uniform(rng, 0.0, 50000.0) : 0.0;
    dist[t].standby = uniform(rng, 0.0, 0.1);
  }
  std::vector<mpc::UninterruptibleLoad> loads;
  for (std::size_t i = 0; i < n_loads; ++i) {
    mpc::UninterruptibleLoad load;
    load.name = "load" + std::to_string(i);
    const int phases = uniform_int(rng, 1, 4);
    for (int c = 0; c < phases; ++c) load.cycle_phases.push_back(uniform(rng, 0.1, 2.0));
    const std::size_t span = static_cast<std::size_t>(phases) + starts_per_load - 1;
    const std::size_t first = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(horizon_len - span)));
    for (std::size_t t = first; t < first + span; ++t) load.window.push_back(t);
    loads.push_back(std::move(load));
  }
  const auto flex = static_cast<mpc::Flexibility>(uniform_int(rng, 0, 2));
  const auto strategy = uniform_int(rng, 0, 1) == 0 ? mpc::BoundStrategy::PriceIndependent
                                                    : mpc::BoundStrategy::PriceDependent;
  const auto x0 = StateVector::make(HeaterVariant::Hvac, uniform(rng, 18.0, 22.0), 0.0, 0.0, uniform(rng, 3.5, 5.5),
                                    uniform(rng, 48.0, 58.0));
  return mpc::make_horizon_problem(building, HeaterVariant::Hvac, x0, std::move(prices), std::move(dist),
                                   mpc::ComfortProfile::preset(flex, strategy), std::move(loads), 900.0, 96);
}

SuiteResult run_lp_vertex_suite(std::uint64_t seed, std::size_t count) {
  SuiteResult out;
  out.name = "lp-vertex";
  std::ostringstream detail;
  for (std::size_t i = 0; i < count; ++i) {
    const auto lp = random_lp(seed * 1000003ULL + i);
    const auto reference = enumerate_vertices(lp);
    const auto solution = lp::solve(lp);
    ++out.cases;
    bool ok = true;
    if (reference.feasible) {
      ok = solution.status == lp::Status::Optimal;
      if (ok) {
        const double err = std::abs(solution.objective_value - reference.objective);
        out.max_error = std::max(out.max_error, err);
        ok = err <= 1e-6 * std::max(1.0, std::abs(reference.objective)) && lp::verify(lp, solution.primal).feasible();
      }
    } else {
      ok = solution.status == lp::Status::Infeasible;
    }
    if (!ok) {
      ++out.failures;
      if (out.failures <= 3) {
        detail << "case " << i << ": solver " << lp::to_string(solution.status) << " " << solution.objective_value
               << ", oracle " << (reference.feasible ? "optimal " : "infeasible ") << reference.objective << "; ";
      }
    }
  }
  out.passed = out.failures == 0 && out.cases > 0;
  out.detail = detail.str();
  return out;
}

SuiteResult run_schedule_suite(std::uint64_t seed, std::size_t count) {
  SuiteResult out;
  out.name = "ul-brute-force";
  std::ostringstream detail;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t horizon = static_cast<std::size_t>(uniform_int(rng, 1, 48));
    std::vector<double> prices;
    const auto load = random_load(seed * 7919ULL + i, horizon, prices);
    const auto reference = brute_force_schedule(load, prices, 0.25);
    const auto result = mpc::schedule_uninterruptible(load, prices, 0.25);
    ++out.cases;
    const bool ok = result.start == reference.start && result.cost == reference.cost && result.power == reference.power;
    out.max_error = std::max(out.max_error, std::abs(result.cost - reference.cost));
    if (!ok) {
      ++out.failures;
      if (out.failures <= 3) {
        detail << "case " << i << ": start " << result.start << " vs " << reference.start << "; ";
      }
    }
  }
  out.passed = out.failures == 0 && out.cases > 0;
  out.detail = detail.str();
  return out;
}

SuiteResult run_decomposition_suite(std::uint64_t seed, std::size_t count) {
  SuiteResult out;
  out.name = "joint-decomposition";
  std::ostringstream detail;
  for (std::size_t i = 0; i < count; ++i) {
    const auto problem = random_horizon_problem(seed * 104729ULL + i, 24, 2, 4);
    const auto decomposed = mpc::solve_horizon(problem);
    const auto joint = mpc::joint_oracle(problem);
    ++out.cases;
    const double err = std::abs(decomposed.total_cost() - joint.total_cost());
    out.max_error = std::max(out.max_error, err);
    if (err > 1e-9) {
      ++out.failures;
      if (out.failures <= 3) detail << "case " << i << ": |diff| " << err << "; ";
    }
  }
  out.passed = out.failures == 0 && out.cases > 0;
  out.detail = detail.str();
  return out;
}

}  // namespace hems::oracle
