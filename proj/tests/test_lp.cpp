#include <gtest/gtest.h>

#include <sstream>

#include "hems/lp.hpp"
#include "hems/oracles.hpp"

namespace lp = hems::lp;

namespace {

lp::LinearProgram simplex_example() {
  lp::LinearProgram p;
  const int x1 = p.add_variable(0.0, lp::kInf, -1.0, "x1");
  const int x2 = p.add_variable(0.0, lp::kInf, -1.0, "x2");
  p.add_less_equal({{x1, 1.0}, {x2, 1.0}}, 1.0, "cap");
  return p;
}

}  // namespace

TEST(LpSolve, EmptyObjectiveSingleBoundedVariable) {
  lp::LinearProgram p;
  p.add_variable(0.0, 1.0, 0.0);
  const auto s = lp::solve(p);
  EXPECT_EQ(s.status, lp::Status::Optimal);
  EXPECT_EQ(s.objective_value, 0.0);
}

TEST(LpSolve, TwoVariableSimplexReachesMinusOne) {
  const auto p = simplex_example();
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.objective_value, -1.0, 1e-12);
  EXPECT_NEAR(s.primal[0] + s.primal[1], 1.0, 1e-12);
  EXPECT_EQ(lp::verify(p, s.primal).max_violation, 0.0);
}

TEST(LpSolve, ContradictoryEqualityIsInfeasible) {
  lp::LinearProgram p;
  const int x = p.add_variable(0.0, 1.0, 0.0);
  p.add_equality({{x, 1.0}}, 2.0);
  EXPECT_EQ(lp::solve(p).status, lp::Status::Infeasible);
}

TEST(LpSolve, UnboundedRayDetected) {
  lp::LinearProgram p;
  const int x = p.add_variable(0.0, lp::kInf, -1.0);
  const int y = p.add_variable(0.0, lp::kInf, 0.0);
  p.add_less_equal({{x, 1.0}, {y, -1.0}}, 1.0);
  EXPECT_EQ(lp::solve(p).status, lp::Status::Unbounded);
}

TEST(LpSolve, FreeVariablesAndEqualities) {
  // min x + y s.t. x - y = 1, x + y >= 3, y free, x <= 10.
  lp::LinearProgram p;
  const int x = p.add_variable(-lp::kInf, 10.0, 1.0);
  const int y = p.add_variable(-lp::kInf, lp::kInf, 1.0);
  p.add_equality({{x, 1.0}, {y, -1.0}}, 1.0);
  p.add_greater_equal({{x, 1.0}, {y, 1.0}}, 3.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.objective_value, 3.0, 1e-9);
  EXPECT_NEAR(s.primal[0], 2.0, 1e-9);
}

TEST(LpSolve, RejectsStructurallyInvalidProgram) {
  lp::LinearProgram p;
  p.add_variable(0.0, 1.0, 0.0);
  p.add_equality({{3, 1.0}}, 0.0);
  EXPECT_THROW(lp::solve(p), lp::LpError);
  lp::LinearProgram crossed;
  crossed.add_variable(2.0, 1.0, 0.0);
  EXPECT_THROW(lp::solve(crossed), lp::LpError);
}

TEST(LpVerify, ReportsBoundViolationMagnitude) {
  const auto p = simplex_example();
  const std::vector<double> candidate{-0.5, 0.5};
  const auto report = lp::verify(p, candidate);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].kind, lp::ViolationKind::LowerBound);
  EXPECT_EQ(report.violations[0].index, 0u);
  EXPECT_DOUBLE_EQ(report.violations[0].magnitude, 0.5);
  EXPECT_FALSE(report.feasible());
}

TEST(LpVerify, RejectsWrongLength) {
  const auto p = simplex_example();
  const std::vector<double> candidate{0.0};
  EXPECT_THROW(lp::verify(p, candidate), lp::LpError);
}

TEST(LpRandom, HundredFeasibleProgramsVerify) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 100; ++seed) {
    hems::oracle::RandomLpOptions opts;
    opts.unanchored_probability = 0.0;
    const auto p = hems::oracle::random_lp(seed, opts);
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, lp::Status::Optimal) << "seed " << seed;
    const auto report = lp::verify(p, s.primal);
    EXPECT_LE(report.max_violation, 1e-7) << "seed " << seed;
    ++checked;
  }
}

TEST(LpRandom, MatchesVertexEnumeration) {
  const auto result = hems::oracle::run_lp_vertex_suite(11, 500);
  EXPECT_TRUE(result.passed) << result.detail;
  EXPECT_EQ(result.cases, 500u);
}

TEST(LpRandom, ObjectiveScalingKeepsSupport) {
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    auto p = hems::oracle::random_lp(seed);
    const auto base = lp::solve(p);
    for (auto& c : p.objective) c *= 8.0;
    const auto scaled = lp::solve(p);
    ASSERT_EQ(base.status, scaled.status);
    if (base.status != lp::Status::Optimal) continue;
    EXPECT_NEAR(scaled.objective_value, 8.0 * base.objective_value, 1e-9 * std::max(1.0, std::abs(scaled.objective_value)));
    EXPECT_EQ(scaled.primal, base.primal) << "seed " << seed;
  }
}

TEST(LpSolve, Deterministic) {
  const auto p = hems::oracle::random_lp(42);
  const auto a = lp::solve(p);
  const auto b = lp::solve(p);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(LpSolve, IterationCapReported) {
  lp::LinearProgram p;
  std::vector<lp::Term> row;
  for (int j = 0; j < 6; ++j) {
    p.add_variable(0.0, 1.0, -1.0 - j);
    row.push_back({j, 1.0});
  }
  p.add_less_equal(row, 2.5);
  lp::SolverOptions opts;
  opts.max_iterations = 1;
  EXPECT_EQ(lp::solve(p, opts).status, lp::Status::IterationLimit);
  EXPECT_EQ(lp::solve(p).status, lp::Status::Optimal);
}

TEST(LpFormat, WritesSectionsAndNames) {
  auto p = simplex_example();
  p.add_equality({{0, 2.0}}, 0.5, "fix");
  p.lower_bounds[1] = -lp::kInf;
  std::ostringstream out;
  lp::write_lp_format(p, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("Minimize\n obj: - 1 x1 - 1 x2\n"), std::string::npos) << text;
  EXPECT_NE(text.find(" fix: + 2 x1 = 0.5\n"), std::string::npos) << text;
  EXPECT_NE(text.find(" cap: + 1 x1 + 1 x2 <= 1\n"), std::string::npos) << text;
  EXPECT_NE(text.find(" x2 free\n"), std::string::npos) << text;
  EXPECT_NE(text.find("End\n"), std::string::npos);
}

TEST(LpFormat, FallsBackToIndexNames) {
  lp::LinearProgram p;
  p.add_variable(0.0, 1.0, 1.0, "1bad");
  p.add_variable(0.0, 1.0, 1.0, "ok");
  const auto names = lp::lp_format_names(p);
  EXPECT_EQ(names, (std::vector<std::string>{"v0", "v1"}));
}
