#include "nsinfer/mds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsinfer/error.hpp"
#include "nsinfer/format.hpp"

namespace nsinfer {

void MdsConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("MdsConfig: eta must be positive");
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw ParameterError("MdsConfig: rho0 must lie in (0, 1)");
  if (lp_max_iters < 0) throw ParameterError("MdsConfig: lp_max_iters must be nonnegative");
}

double default_eta(Index p, Index n) {
  if (p < 2 || n < 1) throw ParameterError("default_eta: need p >= 2 and n >= 1");
  return 0.5 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

MdsConfig default_mds_config(Index p, Index n) {
  MdsConfig cfg;
  cfg.eta = default_eta(p, n);
  return cfg;
}

namespace {

// Encoding with theta_j = scale_j * phi_j. Unit scales give the original
// program.
LpProblem encode(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg, const DenseVector& scale) {
  cfg.validate();
  const Index n = W.rows();
  const Index q = W.cols();
  if (V.size() != n) throw ShapeError("MDS: response length does not match design rows");
  if (n < 2 || q < 1) throw ShapeError("MDS: need n >= 2 and at least one design column");
  const double vnorm = V.norm();
  if (!(vnorm > 0.0)) throw DegenerateInputError("MDS: response has zero norm");

  const DenseMatrix gram = W.transpose() * W;  // q x q
  const DenseVector corr = W.transpose() * V;  // q
  const double bound = cfg.eta * std::sqrt(static_cast<double>(n)) * vnorm;
  const double vv = vnorm * vnorm;

  LpProblem lp;
  const Index nv = 2 * q + 1;
  const Index rho = 2 * q;
  lp.objective = DenseVector::Zero(nv);
  lp.constraint_matrix = DenseMatrix::Zero(2 * q + 1, nv);
  lp.rhs = DenseVector::Zero(2 * q + 1);
  lp.lower_bounds = DenseVector::Zero(nv);
  lp.upper_bounds = DenseVector::Constant(nv, std::numeric_limits<double>::infinity());
  lp.lower_bounds(rho) = cfg.rho0;
  lp.upper_bounds(rho) = 1.0;

  for (Index j = 0; j < q; ++j) {
    lp.objective(j) = scale(j);
    lp.objective(q + j) = scale(j);
  }
  for (Index r = 0; r < q; ++r) {
    // W_r^T V - (G theta)_r <= bound * rho
    for (Index j = 0; j < q; ++j) {
      const double g = gram(r, j) * scale(j);
      lp.constraint_matrix(r, j) = -g;
      lp.constraint_matrix(r, q + j) = g;
      lp.constraint_matrix(q + r, j) = g;
      lp.constraint_matrix(q + r, q + j) = -g;
    }
    lp.constraint_matrix(r, rho) = -bound;
    lp.constraint_matrix(q + r, rho) = -bound;
    lp.rhs(r) = -corr(r);
    lp.rhs(q + r) = corr(r);
  }
  // V^T W theta + (rho0 ||V||^2 / 2) rho <= ||V||^2
  const Index last = 2 * q;
  for (Index j = 0; j < q; ++j) {
    lp.constraint_matrix(last, j) = corr(j) * scale(j);
    lp.constraint_matrix(last, q + j) = -corr(j) * scale(j);
  }
  lp.constraint_matrix(last, rho) = cfg.rho0 * vv / 2.0;
  lp.rhs(last) = vv;
  return lp;
}

}  // namespace

LpProblem build_mds_lp(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg) {
  return encode(W, V, cfg, DenseVector::Ones(W.cols()));
}

namespace {

struct Attempt {
  bool feasible = false;
  MdsFit fit;
  double gap = 0.0;  // ||residual|| / ||V|| - rho
};

class ThetaSolver {
 public:
  ThetaSolver(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg)
      : W_(W), V_(V), cfg_(cfg), scale_(W.cols()) {
    for (Index j = 0; j < W.cols(); ++j) {
      const double nrm = W.col(j).norm();
      scale_(j) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
    lp_ = encode(W, V, cfg, scale_);
    vnorm_ = V.norm();
  }

  // rho free in [rho0, 1] when `fixed` is negative, otherwise pinned.
  Attempt solve(double fixed) {
    const Index q = W_.cols();
    LpProblem lp = lp_;
    if (fixed >= 0.0) {
      lp.lower_bounds(2 * q) = fixed;
      lp.upper_bounds(2 * q) = fixed;
    }
    LpOptions opts;
    opts.max_iters = cfg_.lp_max_iters;
    LpSolution sol;
    try {
      sol = solve_lp(lp, opts);
    } catch (const NumericalError& e) {
      throw EstimationError(std::string("MDS: ") + e.what(), "NumericalFailure");
    }
    pivots_ += sol.iterations;
    ++solves_;
    Attempt a;
    if (sol.status == LpStatus::Infeasible && fixed >= 0.0) return a;
    if (sol.status != LpStatus::Optimal) {
      throw EstimationError("MDS: linear program ended with status " + to_string(sol.status), to_string(sol.status));
    }
    a.feasible = true;
    a.fit.theta.resize(q);
    for (Index j = 0; j < q; ++j) a.fit.theta(j) = scale_(j) * (sol.x(j) - sol.x(q + j));
    a.fit.rho1 = fixed >= 0.0 ? fixed : std::clamp(sol.x(2 * q), cfg_.rho0, 1.0);
    a.fit.residual = V_ - W_ * a.fit.theta;
    a.fit.sigma_hat = a.fit.residual.norm() / std::sqrt(static_cast<double>(W_.rows()));
    a.gap = a.fit.residual.norm() / vnorm_ - a.fit.rho1;
    return a;
  }

  MdsFit finish(MdsFit fit) const {
    fit.lp_iterations = pivots_;
    fit.lp_solves = solves_;
    return fit;
  }

 private:
  const DenseMatrix& W_;
  const DenseVector& V_;
  const MdsConfig& cfg_;
  DenseVector scale_;
  LpProblem lp_;
  double vnorm_ = 0.0;
  Index pivots_ = 0;
  Index solves_ = 0;
};

// Root of gap(rho) = ||V - W theta(rho)|| / ||V|| - rho by a secant iteration
// safeguarded with a bracket [lo, hi]: gap > 0 (or infeasible) at lo and
// gap <= 0 at hi. The returned fit is the best point with gap <= 0, so the
// bound in use is never below the realized residual ratio. Stops when the
// bracket is within 2% of hi or the gap at hi is below 0.5% of hi. The gap is
// piecewise smooth (the optimal basis changes with rho), so two consecutive
// landings on the same side of the root force a bisection step.
MdsFit self_consistent(ThetaSolver& solver, const MdsConfig& cfg) {
  Attempt hi = solver.solve(-1.0);
  if (hi.gap >= 0.0) return hi.fit;
  double lo_rho = cfg.rho0;
  bool lo_known = false;
  bool lo_feasible = false;
  // Last two feasible evaluations for the secant step.
  double r1 = hi.fit.rho1, g1 = hi.gap;
  double r0 = 0.0, g0 = 0.0;
  bool have_two = false;
  int same_side = 0;
  int last_side = 0;
  for (int iter = 0; iter < 30; ++iter) {
    const double hi_rho = hi.fit.rho1;
    if (-hi.gap <= 5e-3 * hi_rho) break;
    if (lo_known && hi_rho - lo_rho <= 2e-2 * hi_rho) break;
    if (hi_rho <= cfg.rho0) break;

    // Fixed-point step first, then secant steps.
    double x = have_two && g1 != g0 ? r1 - g1 * (r1 - r0) / (g1 - g0) : r1 + g1;
    const double margin = 1e-4 * hi_rho;
    const bool stalled = lo_known && same_side >= 2;
    if (stalled || !std::isfinite(x) || x <= lo_rho + margin || x >= hi_rho - margin) {
      x = lo_known && lo_feasible ? 0.5 * (lo_rho + hi_rho) : std::sqrt(lo_rho * hi_rho);
      if (!lo_known) x = std::max(x, lo_rho);
    }
    x = std::max(x, cfg.rho0);
    Attempt m = solver.solve(x);
    const int side = (!m.feasible || m.gap > 0.0) ? -1 : 1;
    same_side = (side == last_side && !stalled) ? same_side + 1 : 1;
    last_side = side;
    if (side < 0) {
      lo_rho = x;
      lo_known = true;
      lo_feasible = m.feasible;
    } else {
      hi = m;
    }
    if (m.feasible) {
      r0 = r1;
      g0 = g1;
      r1 = x;
      g1 = m.gap;
      have_two = true;
    }
    if (x == cfg.rho0 && m.feasible && m.gap <= 0.0) break;
  }
  return hi.fit;
}

MdsFit fit_mds(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg, RhoMode mode) {
  ThetaSolver solver(W, V, cfg);
  if (mode == RhoMode::Joint) return solver.finish(solver.solve(-1.0).fit);
  return solver.finish(self_consistent(solver, cfg));
}

}  // namespace

MdsFit mds_theta(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg) {
  return fit_mds(W, V, cfg, cfg.theta_rho);
}

PiFit mds_pi(const DenseMatrix& W, const DenseMatrix& Z, const MdsConfig& cfg) {
  if (Z.rows() != W.rows()) throw ShapeError("mds_pi: Z and W must have the same number of rows");
  const Index n = W.rows();
  const Index k = Z.cols();
  if (k < 1) throw ShapeError("mds_pi: Z has no columns");

  PiFit fit;
  fit.pi.resize(W.cols(), k);
  fit.rho2.resize(k);
  for (Index j = 0; j < k; ++j) {
    if (!(Z.col(j).norm() > 0.0)) {
      throw DegenerateInputError("mds_pi: column " + std::to_string(j) + " of Z has zero norm");
    }
    try {
      const MdsFit col = fit_mds(W, Z.col(j), cfg, cfg.pi_rho);
      fit.pi.col(j) = col.theta;
      fit.rho2(j) = col.rho1;
    } catch (const EstimationError& e) {
      throw EstimationError("mds_pi column " + std::to_string(j) + ": " + e.what(), e.lp_status(),
                            static_cast<int>(j));
    }
  }
  fit.residuals = Z - W * fit.pi;
  const DenseMatrix q_raw = fit.residuals.transpose() * fit.residuals / static_cast<double>(n);
  fit.q_hat = 0.5 * (q_raw + q_raw.transpose());
  return fit;
}

}  // namespace nsinfer
