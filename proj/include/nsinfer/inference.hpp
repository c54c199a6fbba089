#pragma once

#include <vector>

#include "nsinfer/linalg.hpp"
#include "nsinfer/mds.hpp"
#include "nsinfer/rng.hpp"

namespace nsinfer {

/// Null hypothesis beta_G = beta_G^0 for a coefficient group G.
/// Indices are 0-based, distinct and ascending.
struct Hypothesis {
  std::vector<Index> group;
  DenseVector beta_g0;

  Index size() const { return static_cast<Index>(group.size()); }

  /// Throws ParameterError unless 1 <= |G| < p, indices are sorted, distinct
  /// and in [0, p), and beta_g0 has |G| entries.
  void validate(Index p) const;

  /// Group with a zero null value (the two-sample form, H0: gamma = 0).
  static Hypothesis zero(std::vector<Index> group);
};

struct TestOutcome {
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.0;
  bool reject = false;
  double sigma_hat = 0.0;
  Index quantile_draws = 0;
};

/// Split of the regression under H0: Z = X_G, W = X_{-G}, V = Y - Z beta_G^0.
struct Reconstruction {
  DenseMatrix Z;
  DenseMatrix W;
  DenseVector V;
};

Reconstruction reconstruct(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp);

/// Columns of {0..p-1} not in `group`, ascending.
std::vector<Index> complement(const std::vector<Index>& group, Index p);

/// Empirical (1 - alpha) quantile of ||xi||_inf, xi ~ N(0, cov), from `draws`
/// simulated vectors: the order statistic at 1-based position
/// ceil((1 - alpha) * draws). Coordinates with zero variance are exactly zero
/// and are left out of the simulation.
double gaussian_max_quantile(const DenseMatrix& cov, double alpha, Index draws, RngStream& rng);

/// Self-normalized moment test shared by every moment-based pipeline:
///
///   statistic = ||U^T e||_inf / (sqrt(n) * sigma_hat),  sigma_hat = ||e|| / sqrt(n)
///   critical  = gaussian_max_quantile(U^T U / n, alpha)
///
/// `U` is the n x k matrix of group residuals and `e` the response residual.
TestOutcome moment_test(const DenseMatrix& U, const DenseVector& e, double alpha, Index draws, RngStream& rng);

/// One-sample group test: reconstruct, fit theta and pi by MDS, compare the
/// moment statistic with the simulated Gaussian-max critical value.
/// Throws DegenerateInputError for ||V|| = 0 or a zero group column; MDS
/// estimation failures propagate as EstimationError.
TestOutcome one_sample_test(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                            const MdsConfig& cfg, Index draws, RngStream& rng);

/// Two-sample convolution design.
struct Convolution {
  DenseMatrix Z;  ///< X_{A,G} - X_{B,G}
  DenseMatrix W;  ///< (X_{A,G} + X_{B,G}, X_{A,-G}, X_{B,-G})
  DenseVector Y;  ///< Y_A + Y_B
};

/// Rows are paired by index; samples must have the same n and p.
Convolution convolve(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                     const std::vector<Index>& group);

/// Two-sample homogeneity test of beta_{A,G} = beta_{B,G}.
TestOutcome two_sample_test(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB,
                            const DenseVector& YB, const std::vector<Index>& group, double alpha,
                            const MdsConfig& cfg, Index draws, RngStream& rng);

/// Index of the (1 - alpha) order statistic (0-based) among `draws` values.
Index quantile_position(double alpha, Index draws);

}  // namespace nsinfer
