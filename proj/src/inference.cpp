#include "nsinfer/inference.hpp"

#include <algorithm>
#include <cmath>

#include "nsinfer/error.hpp"

namespace nsinfer {

void Hypothesis::validate(Index p) const {
  const Index k = size();
  if (k < 1) throw ParameterError("hypothesis group is empty");
  if (k >= p) throw ParameterError("hypothesis group must leave at least one column outside it");
  for (Index i = 0; i < k; ++i) {
    if (group[i] < 0 || group[i] >= p) {
      throw ParameterError("hypothesis index " + std::to_string(group[i]) + " out of range");
    }
    if (i > 0 && group[i] <= group[i - 1]) {
      throw ParameterError("hypothesis indices must be distinct and ascending");
    }
  }
  if (beta_g0.size() != k) throw ParameterError("beta_g0 length does not match the group size");
}

Hypothesis Hypothesis::zero(std::vector<Index> group) {
  Hypothesis h;
  h.beta_g0 = DenseVector::Zero(static_cast<Index>(group.size()));
  h.group = std::move(group);
  return h;
}

std::vector<Index> complement(const std::vector<Index>& group, Index p) {
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(p));
  std::size_t g = 0;
  for (Index j = 0; j < p; ++j) {
    if (g < group.size() && group[g] == j) {
      ++g;
      continue;
    }
    rest.push_back(j);
  }
  return rest;
}

Reconstruction reconstruct(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp) {
  if (Y.size() != X.rows()) throw ShapeError("reconstruct: Y length does not match X rows");
  hyp.validate(X.cols());
  Reconstruction r;
  r.Z = select_columns(X, hyp.group);
  r.W = select_columns(X, complement(hyp.group, X.cols()));
  r.V = Y - r.Z * hyp.beta_g0;
  return r;
}

Index quantile_position(double alpha, Index draws) {
  // ceil((1 - alpha) * draws) as a 1-based rank; the small offset keeps
  // products like 0.95 * 10000 from rounding up to the next rank.
  const double rank = std::ceil((1.0 - alpha) * static_cast<double>(draws) - 1e-9);
  return std::clamp<Index>(static_cast<Index>(rank), 1, draws) - 1;
}

double gaussian_max_quantile(const DenseMatrix& cov, double alpha, Index draws, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("gaussian_max_quantile: alpha must lie in (0, 1)");
  if (draws < 1000) throw ParameterError("gaussian_max_quantile: at least 1000 draws required");
  if (cov.rows() != cov.cols()) throw ShapeError("gaussian_max_quantile: covariance must be square");

  std::vector<Index> live;
  for (Index j = 0; j < cov.rows(); ++j) {
    if (cov(j, j) > 0.0) live.push_back(j);
  }
  if (live.empty()) return 0.0;
  DenseMatrix sub(static_cast<Index>(live.size()), static_cast<Index>(live.size()));
  for (std::size_t a = 0; a < live.size(); ++a)
    for (std::size_t b = 0; b < live.size(); ++b) sub(a, b) = cov(live[a], live[b]);

  const CholFactor factor = cholesky_psd(sub);
  const DenseMatrix xi = sample_mvn(factor, draws, rng);
  std::vector<double> norms(static_cast<std::size_t>(draws));
  for (Index i = 0; i < draws; ++i) norms[i] = xi.row(i).cwiseAbs().maxCoeff();
  const auto pos = static_cast<std::ptrdiff_t>(quantile_position(alpha, draws));
  std::nth_element(norms.begin(), norms.begin() + pos, norms.end());
  return norms[static_cast<std::size_t>(pos)];
}

TestOutcome moment_test(const DenseMatrix& U, const DenseVector& e, double alpha, Index draws, RngStream& rng) {
  const Index n = U.rows();
  if (e.size() != n) throw ShapeError("moment_test: residual lengths differ");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  TestOutcome out;
  out.alpha = alpha;
  out.quantile_draws = draws;
  out.sigma_hat = e.norm() / sqrt_n;
  if (!(out.sigma_hat > 0.0)) throw NumericalError("moment_test: response residual is identically zero");
  out.statistic = (U.transpose() * e).cwiseAbs().maxCoeff() / (sqrt_n * out.sigma_hat);

  const DenseMatrix raw = U.transpose() * U / static_cast<double>(n);
  const DenseMatrix cov = 0.5 * (raw + raw.transpose());
  out.critical_value = gaussian_max_quantile(cov, alpha, draws, rng);
  out.reject = out.statistic > out.critical_value;
  return out;
}

namespace {

void require_nonzero_columns(const DenseMatrix& Z, const char* what) {
  for (Index j = 0; j < Z.cols(); ++j) {
    if (!(Z.col(j).norm() > 0.0)) {
      throw DegenerateInputError(std::string(what) + ": group column " + std::to_string(j) + " is identically zero");
    }
  }
}

}  // namespace

TestOutcome one_sample_test(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                            const MdsConfig& cfg, Index draws, RngStream& rng) {
  if (X.rows() < 10) throw ParameterError("one_sample_test: need at least 10 observations");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("one_sample_test: alpha must lie in (0, 1)");
  const Reconstruction r = reconstruct(X, Y, hyp);
  if (!(r.V.norm() > 0.0)) throw DegenerateInputError("one_sample_test: reconstructed response is zero");
  require_nonzero_columns(r.Z, "one_sample_test");

  const MdsFit theta = mds_theta(r.W, r.V, cfg);
  const PiFit pi = mds_pi(r.W, r.Z, cfg);
  return moment_test(pi.residuals, theta.residual, alpha, draws, rng);
}

Convolution convolve(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                     const std::vector<Index>& group) {
  if (XA.rows() != XB.rows() || XA.cols() != XB.cols()) {
    throw ShapeError("convolve: samples must have identical n and p");
  }
  if (YA.size() != XA.rows() || YB.size() != XB.rows()) throw ShapeError("convolve: response length mismatch");
  const Index p = XA.cols();
  Hypothesis::zero(group).validate(p);

  const std::vector<Index> rest = complement(group, p);
  const DenseMatrix AG = select_columns(XA, group);
  const DenseMatrix BG = select_columns(XB, group);
  const Index k = static_cast<Index>(group.size());
  const Index r = static_cast<Index>(rest.size());

  Convolution c;
  c.Z = AG - BG;
  c.W.resize(XA.rows(), k + 2 * r);
  c.W.leftCols(k) = AG + BG;
  c.W.middleCols(k, r) = select_columns(XA, rest);
  c.W.rightCols(r) = select_columns(XB, rest);
  c.Y = YA + YB;
  return c;
}

TestOutcome two_sample_test(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB,
                            const DenseVector& YB, const std::vector<Index>& group, double alpha,
                            const MdsConfig& cfg, Index draws, RngStream& rng) {
  if (XA.rows() < 10) throw ParameterError("two_sample_test: need at least 10 observations");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("two_sample_test: alpha must lie in (0, 1)");
  const Convolution c = convolve(XA, YA, XB, YB, group);
  if (!(c.Y.norm() > 0.0)) throw DegenerateInputError("two_sample_test: convolved response is zero");
  require_nonzero_columns(c.Z, "two_sample_test");

  const MdsFit theta = mds_theta(c.W, c.Y, cfg);
  const PiFit pi = mds_pi(c.W, c.Z, cfg);
  return moment_test(pi.residuals, theta.residual, alpha, draws, rng);
}

}  // namespace nsinfer
