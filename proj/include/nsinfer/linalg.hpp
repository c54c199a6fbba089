#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsinfer/rng.hpp"

namespace nsinfer {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Population covariance of the Gaussian design rows.
///
///   Toeplitz(rho):        Sigma_ij = rho^|i-j|
///   Identity:             Sigma = I
///   Equicorrelated(rho):  1 on the diagonal, rho elsewhere
///   Scaled(base, c):      c * base
class CovarianceSpec {
 public:
  enum class Kind { Toeplitz, Identity, Equicorrelated, Scaled };

  static CovarianceSpec toeplitz(double rho);
  static CovarianceSpec identity();
  static CovarianceSpec equicorrelated(double rho);
  static CovarianceSpec scaled(CovarianceSpec base, double c);

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  double factor() const noexcept { return factor_; }
  const CovarianceSpec& base() const { return *base_; }

  /// Canonical text form, e.g. "toeplitz(0.4)" or "scaled(identity,2)".
  std::string to_string() const;

  friend bool operator==(const CovarianceSpec& a, const CovarianceSpec& b) {
    return a.to_string() == b.to_string();
  }

 private:
  CovarianceSpec() = default;

  Kind kind_ = Kind::Identity;
  double rho_ = 0.0;
  double factor_ = 1.0;
  std::shared_ptr<const CovarianceSpec> base_;
};

/// Lower-triangular factor L with L * L^T = A + jitter_used * I.
struct CholFactor {
  DenseMatrix lower;
  double jitter_used = 0.0;

  Index dim() const { return lower.rows(); }
};

DenseMatrix build_covariance(const CovarianceSpec& spec, Index p);

/// Cholesky factorization with diagonal-jitter repair for numerically
/// semidefinite input. Jitter ladder: 0, 1e-12, 1e-10, 1e-8, 1e-6.
/// Throws ShapeError when A is not square or not symmetric within 1e-10, and
/// NumericalError when the largest jitter still fails.
CholFactor cholesky_psd(const DenseMatrix& A);

/// `count` independent rows x = L g with g standard normal; result is
/// count x p.
DenseMatrix sample_mvn(const CholFactor& factor, Index count, RngStream& rng);

/// Max-entry norm ||A||_max.
double max_abs(const DenseMatrix& A);

bool is_symmetric(const DenseMatrix& A, double tol);

/// Columns of X selected by `cols`, in the given order.
DenseMatrix select_columns(const DenseMatrix& X, const std::vector<Index>& cols);

}  // namespace nsinfer
