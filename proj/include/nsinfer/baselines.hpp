#pragma once

#include <functional>
#include <vector>

#include "nsinfer/inference.hpp"
#include "nsinfer/linalg.hpp"
#include "nsinfer/rng.hpp"

namespace nsinfer {

struct LassoFit {
  DenseVector coefficients;
  double lambda = 0.0;
  Index iterations = 0;  ///< coordinate sweeps performed
  bool converged = false;
};

constexpr double kLassoTolerance = 1e-7;
constexpr Index kLassoMaxSweeps = 10000;

/// Cyclic coordinate descent on (1 / 2n) ||y - X beta||^2 + lambda ||beta||_1,
/// stopping when the largest coordinate change in a sweep is <= 1e-7.
/// All-zero columns keep a zero coefficient.
LassoFit lasso_cd(const DenseMatrix& X, const DenseVector& y, double lambda, Index max_sweeps = kLassoMaxSweeps);

/// sqrt(log(p) / n), p being the width of the design regressed on.
double default_lambda(Index p, Index n);

using LambdaRule = std::function<double(Index p, Index n)>;

struct PrecisionFit {
  DenseMatrix theta_hat;  ///< p x p
  DenseVector per_column_lambda;
  DenseVector tau2;  ///< tau_j^2, so theta_hat(j, j) = 1 / tau2(j)
};

/// Nodewise Lasso: for every j regress X_j on X_{-j} with lambda_j from the
/// rule evaluated at (p, n) and set row j of Theta to (1, -gamma_j) / tau_j^2
/// in original coordinates, with
/// tau_j^2 = ||X_j - X_{-j} gamma_j||^2 / n + lambda_j ||gamma_j||_1.
/// Throws DegenerateInputError when some tau_j^2 <= 1e-12.
PrecisionFit nodewise_lasso(const DenseMatrix& X, const LambdaRule& rule = default_lambda);

struct DebiasedFit {
  DenseVector beta_lasso;
  DenseVector beta_debias;  ///< beta_lasso + Theta X^T (y - X beta_lasso) / n
  DenseMatrix omega_hat;    ///< Theta Sigma_hat Theta^T, Sigma_hat = X^T X / n
  DenseVector residual;     ///< y - X beta_lasso
  double sigma_eps = 0.0;   ///< ||residual|| / sqrt(max(n - support, 1))
};

DebiasedFit debiased_lasso(const DenseMatrix& X, const DenseVector& y, double lambda, const PrecisionFit& precision);

/// Tuning shared by the comparator tests. lambda = 0 selects default_lambda
/// at the width of each regression.
struct BaselineOptions {
  double lambda = 0.0;
  Index max_sweeps = kLassoMaxSweeps;
};

/// Moment test of the one-sample pipeline with theta and each pi_j estimated
/// by the debiased Lasso on W (one shared nodewise precision of W).
TestOutcome mdl_test_one(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                         Index draws, RngStream& rng, const BaselineOptions& opts = {});

/// max_{j in G} sqrt(n) |b_j - b0_j| / (sigma sqrt(Omega_jj)) against the
/// simulated (1 - alpha) quantile of max_{j in G} |W_j| / (sigma sqrt(Omega_jj)),
/// W ~ N(0, sigma^2 Omega_GG). Throws NumericalError for a nonpositive
/// Omega_jj and ParameterError for sigma_eps <= 0.
TestOutcome wdl_test_one(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                         double sigma_eps, Index draws, RngStream& rng, const BaselineOptions& opts = {});

/// Two-sample moment test on the convolution design with debiased-Lasso fits.
TestOutcome mdl_test_two(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                         const std::vector<Index>& group, double alpha, Index draws, RngStream& rng,
                         const BaselineOptions& opts = {});

/// max_{j in G} sqrt(n) |bA_j - bB_j| / (sA sqrt(OmegaA_jj) + sB sqrt(OmegaB_jj))
/// against the simulated quantile of the same ratio with bA - bB replaced by
/// W_A - W_B, W_A ~ N(0, sA^2 OmegaA_GG), W_B ~ N(0, sB^2 OmegaB_GG) independent.
/// The outcome's sigma_hat field holds sigma_a.
TestOutcome wdl_test_two(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                         const std::vector<Index>& group, double alpha, double sigma_a, double sigma_b, Index draws,
                         RngStream& rng, const BaselineOptions& opts = {});

/// Residual-based noise scale from a Lasso fit of y on X (the sigma_eps
/// field of DebiasedFit without the precision step).
double estimate_noise_scale(const DenseMatrix& X, const DenseVector& y, const BaselineOptions& opts = {});

}  // namespace nsinfer
