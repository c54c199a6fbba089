#pragma once

#include <string>

#include "nsinfer/linalg.hpp"

namespace nsinfer {

/// Dense linear program
///
///   minimize    c^T x
///   subject to  A x <= b
///               lower <= x <= upper
///
/// Bounds may be infinite (-inf lower, +inf upper).
struct LpProblem {
  DenseVector objective;
  DenseMatrix constraint_matrix;
  DenseVector rhs;
  DenseVector lower_bounds;
  DenseVector upper_bounds;

  Index num_vars() const { return objective.size(); }
  Index num_rows() const { return constraint_matrix.rows(); }

  /// Throws ShapeError on inconsistent dimensions and ParameterError on
  /// lower > upper or NaN data.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  DenseVector x;
  double objective_value = 0.0;
  Index iterations = 0;
};

enum class SimplexMethod {
  /// Dual simplex when the slack basis is dual feasible, primal otherwise.
  Auto,
  Primal,
  Dual,
};

struct LpOptions {
  /// 0 selects the default 50 * (d + m).
  Index max_iters = 0;
  SimplexMethod method = SimplexMethod::Auto;
};

/// Feasibility tolerances of the solution contract.
inline constexpr double kLpRowTolerance = 1e-7;
inline constexpr double kLpBoundTolerance = 1e-9;

/// Bounded-variable simplex with an explicit basis inverse (refactored
/// periodically), Harris-style two-pass ratio tests and Bland's rule while a
/// run of degenerate pivots is in progress. Deterministic: identical input
/// gives bit-identical output.
///
/// Statuses other than Optimal are reported in the solution, never thrown.
/// A numerically singular basis throws NumericalError.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});
LpSolution solve_lp(const LpProblem& problem, Index max_iters);

struct FeasibilityReport {
  double max_row_violation = 0.0;    ///< max_i max(0, (Ax - b)_i)
  double max_bound_violation = 0.0;  ///< max_j distance of x_j outside [l_j, u_j]

  bool ok(double row_tol = kLpRowTolerance, double bound_tol = kLpBoundTolerance) const {
    return max_row_violation <= row_tol && max_bound_violation <= bound_tol;
  }
};

/// Recheck of a candidate point against the raw problem data.
FeasibilityReport check_feasibility(const LpProblem& problem, const DenseVector& x);

}  // namespace nsinfer
