#pragma once

#include "nsinfer/linalg.hpp"
#include "nsinfer/lp.hpp"

namespace nsinfer {

/// How the noise-ratio variable rho is determined.
///
///   Joint:          rho is a free LP variable in [rho0, 1], optimized together
///                   with theta. The l1 objective drives it to the loosest
///                   admissible bound in practice.
///   SelfConsistent: rho solves rho = ||V - W theta(rho)||_2 / ||V||_2, where
///                   theta(rho) is the program's solution at that fixed rho, so
///                   rho estimates the noise-to-response ratio it stands for.
enum class RhoMode { Joint, SelfConsistent };

/// Tuning of the Modified Dantzig Selector.
struct MdsConfig {
  double eta = 0.0;   ///< correlation bound scale, eta > 0
  double rho0 = 0.01; ///< lower bound of the noise ratio, in (0, 1)
  Index lp_max_iters = 0;  ///< 0 selects the LP default
  RhoMode theta_rho = RhoMode::Joint;        ///< used by mds_theta
  RhoMode pi_rho = RhoMode::SelfConsistent;  ///< used by mds_pi

  void validate() const;
};

/// eta = 0.5 * sqrt(log(p) / n), with p the width of the ambient regression.
double default_eta(Index p, Index n);

MdsConfig default_mds_config(Index p, Index n);

struct MdsFit {
  DenseVector theta;     ///< coefficient estimate, length q
  double rho1 = 0.0;     ///< noise ratio in [rho0, 1] at which theta was solved
  DenseVector residual;  ///< V - W theta
  double sigma_hat = 0.0;  ///< ||residual||_2 / sqrt(n)
  Index lp_iterations = 0;  ///< simplex pivots over all solves
  Index lp_solves = 0;
};

/// Column-wise fit Z_j ~ W pi_j for every column of Z.
struct PiFit {
  DenseMatrix pi;         ///< q x k
  DenseMatrix residuals;  ///< U = Z - W pi, n x k
  DenseMatrix q_hat;      ///< U^T U / n, k x k
  DenseVector rho2;       ///< per-column noise ratio
};

/// Linear program for
///
///   min ||theta||_1
///   s.t. ||W^T (V - W theta)||_inf <= eta * rho * sqrt(n) * ||V||_2
///        V^T (V - W theta)         >= rho0 * rho * ||V||_2^2 / 2
///        rho in [rho0, 1]
///
/// over x = (theta+, theta-, rho), theta = theta+ - theta-, theta+/- >= 0.
/// Rows: q upper correlation rows, q lower correlation rows, then the moment
/// row; 2q + 1 rows and 2q + 1 variables in total. Throws
/// DegenerateInputError when ||V||_2 = 0.
LpProblem build_mds_lp(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg);

/// Solves the program above, with rho chosen per cfg.theta_rho. W columns are
/// normalized internally (a change of LP variables only; constraints and
/// objective keep their original meaning)
/// and theta is mapped back. Throws EstimationError when the LP is not solved
/// to optimality.
MdsFit mds_theta(const DenseMatrix& W, const DenseVector& V, const MdsConfig& cfg);

/// One MDS program per column of Z with V replaced by Z_j and rho chosen per
/// cfg.pi_rho. Estimation failures carry the failing column index.
PiFit mds_pi(const DenseMatrix& W, const DenseMatrix& Z, const MdsConfig& cfg);

}  // namespace nsinfer
