#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "nsinfer/error.hpp"
#include "nsinfer/lp.hpp"
#include "oracles.hpp"

using namespace nsinfer;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem make(DenseVector c, DenseMatrix A, DenseVector b, DenseVector lo, DenseVector up) {
  LpProblem p;
  p.objective = std::move(c);
  p.constraint_matrix = std::move(A);
  p.rhs = std::move(b);
  p.lower_bounds = std::move(lo);
  p.upper_bounds = std::move(up);
  return p;
}

// Random bounded instance; feasible when `feasible` by construction
// (b = A x0 + slack for an interior x0), otherwise b is unrestricted.
LpProblem random_instance(std::mt19937_64& gen, bool feasible) {
  std::uniform_int_distribution<int> dd(1, 6), mm(1, 10);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  const Index d = dd(gen), m = mm(gen);
  DenseVector c(d), lo(d), up(d), x0(d);
  DenseMatrix A(m, d);
  DenseVector b(m);
  for (Index j = 0; j < d; ++j) {
    c(j) = u(gen);
    lo(j) = -1.0 - 2.0 * pos(gen);
    up(j) = 1.0 + 2.0 * pos(gen);
    x0(j) = 0.5 * u(gen);
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) A(i, j) = u(gen);
    b(i) = feasible ? A.row(i).dot(x0) + pos(gen) : 3.0 * u(gen) - 1.5;
  }
  return make(c, A, b, lo, up);
}

}  // namespace

TEST(SolveLp, SingleVariableBound) {
  const auto p = make(DenseVector::Ones(1), DenseMatrix(0, 1), DenseVector(0),
                      DenseVector::Constant(1, 2.0), DenseVector::Constant(1, kInf));
  const auto sol = solve_lp(p);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(sol.x(0), 2.0);
  EXPECT_DOUBLE_EQ(sol.objective_value, 2.0);
}

TEST(SolveLp, SimplexSegment) {
  DenseMatrix A(1, 2);
  A << 1, 1;
  const auto p = make(DenseVector::Constant(2, -1.0), A, DenseVector::Ones(1), DenseVector::Zero(2),
                      DenseVector::Ones(2));
  for (auto method : {SimplexMethod::Auto, SimplexMethod::Primal, SimplexMethod::Dual}) {
    LpOptions opts;
    opts.method = method;
    const auto sol = solve_lp(p, opts);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.objective_value, -1.0, 1e-12);
    EXPECT_NEAR(sol.x.sum(), 1.0, 1e-12);
    EXPECT_TRUE(check_feasibility(p, sol.x).ok());
  }
}

TEST(SolveLp, EmptyFeasibleSet) {
  DenseMatrix A(1, 1);
  A << 1;
  const auto p = make(DenseVector::Zero(1), A, DenseVector::Constant(1, -1.0), DenseVector::Zero(1),
                      DenseVector::Constant(1, kInf));
  for (auto method : {SimplexMethod::Auto, SimplexMethod::Primal}) {
    LpOptions opts;
    opts.method = method;
    EXPECT_EQ(solve_lp(p, opts).status, LpStatus::Infeasible);
  }
}

TEST(SolveLp, UnboundedRay) {
  // min -x s.t. x - y <= 1, x, y >= 0.
  DenseMatrix A(1, 2);
  A << 1, -1;
  const auto p = make((DenseVector(2) << -1, 0).finished(), A, DenseVector::Ones(1), DenseVector::Zero(2),
                      DenseVector::Constant(2, kInf));
  EXPECT_EQ(solve_lp(p).status, LpStatus::Unbounded);
}

TEST(SolveLp, FreeVariables) {
  // min |x - 3| written as min t s.t. x - t <= 3, -x - t <= -3, x free.
  DenseMatrix A(2, 2);
  A << 1, -1, -1, -1;
  const auto p = make((DenseVector(2) << 0, 1).finished(), A, (DenseVector(2) << 3, -3).finished(),
                      (DenseVector(2) << -kInf, 0).finished(), DenseVector::Constant(2, kInf));
  const auto sol = solve_lp(p);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x(0), 3.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, 0.0, 1e-12);
}

TEST(SolveLp, IterationLimitIsReported) {
  std::mt19937_64 gen(7);
  auto p = random_instance(gen, true);
  while (p.num_rows() < 6) p = random_instance(gen, true);
  LpOptions opts;
  opts.max_iters = 1;
  opts.method = SimplexMethod::Primal;
  p.objective.setConstant(-1.0);
  const auto sol = solve_lp(p, opts);
  EXPECT_TRUE(sol.status == LpStatus::IterationLimit || sol.status == LpStatus::Optimal);
  EXPECT_LE(sol.iterations, 1);
}

TEST(SolveLp, RejectsInconsistentShapes) {
  const auto p = make(DenseVector::Ones(2), DenseMatrix::Ones(1, 3), DenseVector::Ones(1), DenseVector::Zero(2),
                      DenseVector::Ones(2));
  EXPECT_THROW(solve_lp(p), ShapeError);
  const auto q = make(DenseVector::Ones(1), DenseMatrix(0, 1), DenseVector(0), DenseVector::Ones(1),
                      DenseVector::Zero(1));
  EXPECT_THROW(solve_lp(q), ParameterError);
}

// Oracle equivalence over random bounded instances, for each simplex variant.
TEST(SolveLp, MatchesVertexEnumeration) {
  std::mt19937_64 gen(20240601);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = random_instance(gen, trial % 3 != 0);
    const auto best = oracle::enumerate_vertices(p);
    for (auto method : {SimplexMethod::Primal, SimplexMethod::Dual}) {
      LpOptions opts;
      opts.method = method;
      const auto sol = solve_lp(p, opts);
      if (!best) {
        EXPECT_EQ(sol.status, LpStatus::Infeasible) << "trial " << trial;
        ++infeasible_seen;
        continue;
      }
      ASSERT_EQ(sol.status, LpStatus::Optimal) << "trial " << trial;
      EXPECT_NEAR(sol.objective_value, *best, 1e-8) << "trial " << trial;
      EXPECT_TRUE(check_feasibility(p, sol.x).ok()) << "trial " << trial;
    }
  }
  EXPECT_GT(infeasible_seen, 0);
}

TEST(SolveLp, DegenerateInstancesTerminate) {
  // Many redundant constraints through the same vertex.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 4, m = 12;
    DenseMatrix A(m, d);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < d; ++j) A(i, j) = u(gen);
    const DenseVector b = DenseVector::Zero(m);  // every row active at x = 0
    DenseVector c(d);
    for (Index j = 0; j < d; ++j) c(j) = u(gen);
    const auto p = make(c, A, b, DenseVector::Constant(d, -1.0), DenseVector::Constant(d, 1.0));
    const auto best = oracle::enumerate_vertices(p);
    ASSERT_TRUE(best);
    for (auto method : {SimplexMethod::Primal, SimplexMethod::Dual}) {
      LpOptions opts;
      opts.method = method;
      const auto sol = solve_lp(p, opts);
      ASSERT_EQ(sol.status, LpStatus::Optimal);
      EXPECT_NEAR(sol.objective_value, *best, 1e-8);
    }
  }
}

TEST(SolveLp, Deterministic) {
  std::mt19937_64 gen(3);
  const auto p = random_instance(gen, true);
  const auto a = solve_lp(p);
  const auto b = solve_lp(p);
  ASSERT_EQ(a.status, b.status);
  EXPECT_EQ(a.iterations, b.iterations);
  for (Index j = 0; j < a.x.size(); ++j) EXPECT_EQ(a.x(j), b.x(j));
}
