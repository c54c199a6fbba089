#include "nsinfer/linalg.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "nsinfer/error.hpp"
#include "nsinfer/format.hpp"

namespace nsinfer {

CovarianceSpec CovarianceSpec::toeplitz(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw ParameterError("toeplitz correlation must lie in (-1, 1), got " + format_double(rho));
  }
  CovarianceSpec s;
  s.kind_ = Kind::Toeplitz;
  s.rho_ = rho;
  return s;
}

CovarianceSpec CovarianceSpec::identity() { return CovarianceSpec(); }

CovarianceSpec CovarianceSpec::equicorrelated(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw ParameterError("equicorrelation must lie in (-1, 1), got " + format_double(rho));
  }
  CovarianceSpec s;
  s.kind_ = Kind::Equicorrelated;
  s.rho_ = rho;
  return s;
}

CovarianceSpec CovarianceSpec::scaled(CovarianceSpec base, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ParameterError("covariance scale factor must be positive, got " + format_double(c));
  }
  CovarianceSpec s;
  s.kind_ = Kind::Scaled;
  s.factor_ = c;
  s.base_ = std::make_shared<const CovarianceSpec>(std::move(base));
  return s;
}

std::string CovarianceSpec::to_string() const {
  switch (kind_) {
    case Kind::Toeplitz:
      return "toeplitz(" + format_double(rho_) + ")";
    case Kind::Identity:
      return "identity";
    case Kind::Equicorrelated:
      return "equicorrelated(" + format_double(rho_) + ")";
    case Kind::Scaled:
      return "scaled(" + base_->to_string() + "," + format_double(factor_) + ")";
  }
  return "unknown";
}

DenseMatrix build_covariance(const CovarianceSpec& spec, Index p) {
  if (p < 1) throw ParameterError("covariance dimension must be at least 1");
  DenseMatrix S(p, p);
  switch (spec.kind()) {
    case CovarianceSpec::Kind::Identity:
      S.setIdentity();
      break;
    case CovarianceSpec::Kind::Toeplitz:
      for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
          S(i, j) = std::pow(spec.rho(), static_cast<double>(std::abs(i - j)));
        }
      }
      break;
    case CovarianceSpec::Kind::Equicorrelated:
      if (p > 1 && !(spec.rho() > -1.0 / static_cast<double>(p - 1))) {
        throw ParameterError("equicorrelation " + format_double(spec.rho()) +
                             " is not positive definite for p = " + std::to_string(p));
      }
      S.setConstant(spec.rho());
      S.diagonal().setOnes();
      break;
    case CovarianceSpec::Kind::Scaled:
      S = spec.factor() * build_covariance(spec.base(), p);
      break;
  }
  return S;
}

double max_abs(const DenseMatrix& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

bool is_symmetric(const DenseMatrix& A, double tol) {
  if (A.rows() != A.cols()) return false;
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (!(std::abs(A(i, j) - A(j, i)) <= tol)) return false;
    }
  }
  return true;
}

namespace {

// Plain right-looking Cholesky on A + jitter I; false on a nonpositive or
// non-finite pivot.
bool try_cholesky(const DenseMatrix& A, double jitter, DenseMatrix& L) {
  const Index n = A.rows();
  L.setZero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = A(j, j) + jitter;
    for (Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace

CholFactor cholesky_psd(const DenseMatrix& A) {
  if (A.rows() != A.cols()) {
    throw ShapeError("cholesky_psd: matrix is " + std::to_string(A.rows()) + "x" +
                     std::to_string(A.cols()) + ", expected square");
  }
  if (!A.allFinite()) throw NumericalError("cholesky_psd: non-finite entries");
  if (!is_symmetric(A, 1e-10)) throw ShapeError("cholesky_psd: matrix is not symmetric");

  constexpr std::array<double, 5> ladder{0.0, 1e-12, 1e-10, 1e-8, 1e-6};
  CholFactor f;
  for (double jitter : ladder) {
    if (try_cholesky(A, jitter, f.lower)) {
      f.jitter_used = jitter;
      return f;
    }
  }
  throw NumericalError("cholesky_psd: factorization failed at maximum jitter 1e-6");
}

DenseMatrix sample_mvn(const CholFactor& factor, Index count, RngStream& rng) {
  if (count < 1) throw ParameterError("sample_mvn: count must be positive");
  const Index p = factor.dim();
  DenseMatrix G(count, p);
  // Row-by-row so the draw order does not depend on storage layout.
  for (Index r = 0; r < count; ++r) {
    for (Index c = 0; c < p; ++c) G(r, c) = rng.normal();
  }
  return G * factor.lower.transpose();
}

DenseMatrix select_columns(const DenseMatrix& X, const std::vector<Index>& cols) {
  DenseMatrix out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= X.cols()) throw ShapeError("select_columns: column index out of range");
    out.col(static_cast<Index>(j)) = X.col(cols[j]);
  }
  return out;
}

}  // namespace nsinfer
