#include "nsinfer/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "nsinfer/error.hpp"

namespace nsinfer {

double default_lambda(Index p, Index n) {
  if (p < 2 || n < 1) throw ParameterError("default_lambda: need p >= 2 and n >= 1");
  return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct CdWork {
  const DenseMatrix& X;
  const DenseVector& colsq;  // ||X_j||^2 / n
  Index skip;                // column excluded from the regression, or -1
  double lambda;
  double inv_n;
};

// One pass over `cols`; returns the largest absolute coefficient change.
double sweep(const CdWork& w, const std::vector<Index>& cols, DenseVector& beta, DenseVector& r) {
  double max_change = 0.0;
  for (Index j : cols) {
    const double cj = w.colsq(j);
    const double old = beta(j);
    const double z = w.X.col(j).dot(r) * w.inv_n + cj * old;
    const double updated = soft_threshold(z, w.lambda) / cj;
    const double delta = updated - old;
    if (delta != 0.0) {
      r.noalias() -= delta * w.X.col(j);
      beta(j) = updated;
      max_change = std::max(max_change, std::abs(delta));
    }
  }
  return max_change;
}

// Full sweeps alternate with sweeps over the current support until a full
// sweep moves no coordinate by more than the tolerance.
LassoFit coordinate_descent(const CdWork& w, const DenseVector& y, Index max_sweeps) {
  const Index p = w.X.cols();
  std::vector<Index> all;
  for (Index j = 0; j < p; ++j) {
    if (j != w.skip && w.colsq(j) > 0.0) all.push_back(j);
  }
  LassoFit fit;
  fit.lambda = w.lambda;
  fit.coefficients = DenseVector::Zero(p);
  DenseVector r = y;
  while (fit.iterations < max_sweeps) {
    ++fit.iterations;
    if (sweep(w, all, fit.coefficients, r) <= kLassoTolerance) {
      fit.converged = true;
      break;
    }
    std::vector<Index> active;
    for (Index j : all) {
      if (fit.coefficients(j) != 0.0) active.push_back(j);
    }
    while (fit.iterations < max_sweeps) {
      ++fit.iterations;
      if (sweep(w, active, fit.coefficients, r) <= kLassoTolerance) break;
    }
  }
  return fit;
}

DenseVector column_scales(const DenseMatrix& X) {
  return X.colwise().squaredNorm().transpose() / static_cast<double>(X.rows());
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lasso: lambda must be positive");
}

}  // namespace

LassoFit lasso_cd(const DenseMatrix& X, const DenseVector& y, double lambda, Index max_sweeps) {
  if (y.size() != X.rows()) throw ShapeError("lasso_cd: y length does not match X rows");
  if (X.rows() < 1 || X.cols() < 1) throw ShapeError("lasso_cd: empty design");
  check_lambda(lambda);
  if (max_sweeps < 1) throw ParameterError("lasso_cd: max_sweeps must be positive");
  const DenseVector colsq = column_scales(X);
  if (!(colsq.maxCoeff() > 0.0)) throw DegenerateInputError("lasso_cd: every column of X is zero");
  const CdWork w{X, colsq, -1, lambda, 1.0 / static_cast<double>(X.rows())};
  return coordinate_descent(w, y, max_sweeps);
}

PrecisionFit nodewise_lasso(const DenseMatrix& X, const LambdaRule& rule) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 10) throw ParameterError("nodewise_lasso: need at least 10 observations");
  if (p < 2) throw ShapeError("nodewise_lasso: need at least two columns");
  const DenseVector colsq = column_scales(X);
  const double inv_n = 1.0 / static_cast<double>(n);

  PrecisionFit fit;
  fit.theta_hat = DenseMatrix::Zero(p, p);
  fit.per_column_lambda.resize(p);
  fit.tau2.resize(p);
  for (Index j = 0; j < p; ++j) {
    const double lambda = rule(p, n);
    check_lambda(lambda);
    const CdWork w{X, colsq, j, lambda, inv_n};
    const LassoFit gamma = coordinate_descent(w, X.col(j), kLassoMaxSweeps);
    const DenseVector resid = X.col(j) - X * gamma.coefficients;
    const double tau2 = resid.squaredNorm() * inv_n + lambda * gamma.coefficients.lpNorm<1>();
    if (!(tau2 > 1e-12)) {
      throw DegenerateInputError("nodewise_lasso: column " + std::to_string(j) + " is (nearly) a combination of the others");
    }
    fit.theta_hat.row(j) = -gamma.coefficients.transpose() / tau2;
    fit.theta_hat(j, j) = 1.0 / tau2;
    fit.per_column_lambda(j) = lambda;
    fit.tau2(j) = tau2;
  }
  return fit;
}

namespace {

struct Debiased {
  LassoFit lasso;
  DenseVector residual;
  DenseVector beta;
};

Debiased debias(const DenseMatrix& X, const DenseVector& y, double lambda, const PrecisionFit& precision,
                Index max_sweeps) {
  if (precision.theta_hat.rows() != X.cols() || precision.theta_hat.cols() != X.cols()) {
    throw ShapeError("debiased_lasso: precision estimate does not match the design width");
  }
  Debiased d;
  d.lasso = lasso_cd(X, y, lambda, max_sweeps);
  d.residual = y - X * d.lasso.coefficients;
  d.beta = d.lasso.coefficients + precision.theta_hat * (X.transpose() * d.residual) / static_cast<double>(X.rows());
  return d;
}

double residual_scale(const DenseVector& residual, const DenseVector& coefficients) {
  const Index support = (coefficients.array() != 0.0).count();
  const Index dof = std::max<Index>(residual.size() - support, 1);
  return residual.norm() / std::sqrt(static_cast<double>(dof));
}

double lambda_for(const BaselineOptions& opts, Index width, Index n) {
  return opts.lambda > 0.0 ? opts.lambda : default_lambda(width, n);
}

}  // namespace

DebiasedFit debiased_lasso(const DenseMatrix& X, const DenseVector& y, double lambda, const PrecisionFit& precision) {
  const Debiased d = debias(X, y, lambda, precision, kLassoMaxSweeps);
  DebiasedFit fit;
  fit.beta_lasso = d.lasso.coefficients;
  fit.beta_debias = d.beta;
  fit.residual = d.residual;
  fit.sigma_eps = residual_scale(d.residual, d.lasso.coefficients);
  const DenseMatrix M = precision.theta_hat * X.transpose();
  const DenseMatrix raw = M * M.transpose() / static_cast<double>(X.rows());
  fit.omega_hat = 0.5 * (raw + raw.transpose());
  return fit;
}

double estimate_noise_scale(const DenseMatrix& X, const DenseVector& y, const BaselineOptions& opts) {
  const LassoFit fit = lasso_cd(X, y, lambda_for(opts, X.cols(), X.rows()), opts.max_sweeps);
  return residual_scale(y - X * fit.coefficients, fit.coefficients);
}

namespace {

void require_nonzero(const DenseVector& V, const DenseMatrix& Z, const char* what) {
  if (!(V.norm() > 0.0)) throw DegenerateInputError(std::string(what) + ": response is identically zero");
  for (Index j = 0; j < Z.cols(); ++j) {
    if (!(Z.col(j).norm() > 0.0)) {
      throw DegenerateInputError(std::string(what) + ": group column " + std::to_string(j) + " is identically zero");
    }
  }
}

TestOutcome mdl_core(const DenseMatrix& W, const DenseVector& V, const DenseMatrix& Z, double alpha, Index draws,
                     RngStream& rng, const BaselineOptions& opts) {
  const Index n = W.rows();
  const double lambda = lambda_for(opts, W.cols(), n);
  const PrecisionFit precision =
      nodewise_lasso(W, [&](Index width, Index rows) { return lambda_for(opts, width, rows); });
  const Debiased theta = debias(W, V, lambda, precision, opts.max_sweeps);
  DenseMatrix U(n, Z.cols());
  for (Index j = 0; j < Z.cols(); ++j) {
    const Debiased pi = debias(W, Z.col(j), lambda, precision, opts.max_sweeps);
    U.col(j) = Z.col(j) - W * pi.beta;
  }
  return moment_test(U, V - W * theta.beta, alpha, draws, rng);
}

void check_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError(std::string(what) + ": alpha must lie in (0, 1)");
}

struct WaldParts {
  DenseVector estimate;  // debiased coefficients restricted to G
  DenseMatrix omega;     // Omega_GG
};

WaldParts wald_parts(const DenseMatrix& X, const DenseVector& y, const std::vector<Index>& group,
                     const BaselineOptions& opts) {
  const Index n = X.rows();
  const double lambda = lambda_for(opts, X.cols(), n);
  const PrecisionFit precision =
      nodewise_lasso(X, [&](Index width, Index rows) { return lambda_for(opts, width, rows); });
  const DebiasedFit fit = debiased_lasso(X, y, lambda, precision);
  WaldParts parts;
  const Index k = static_cast<Index>(group.size());
  parts.estimate.resize(k);
  parts.omega.resize(k, k);
  for (Index a = 0; a < k; ++a) {
    parts.estimate(a) = fit.beta_debias(group[a]);
    for (Index b = 0; b < k; ++b) parts.omega(a, b) = fit.omega_hat(group[a], group[b]);
    if (!(parts.omega(a, a) > 0.0)) {
      throw NumericalError("wdl: nonpositive variance estimate for coefficient " + std::to_string(group[a]));
    }
  }
  return parts;
}

}  // namespace

TestOutcome mdl_test_one(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                         Index draws, RngStream& rng, const BaselineOptions& opts) {
  if (X.rows() < 10) throw ParameterError("mdl_test_one: need at least 10 observations");
  check_alpha(alpha, "mdl_test_one");
  const Reconstruction r = reconstruct(X, Y, hyp);
  require_nonzero(r.V, r.Z, "mdl_test_one");
  return mdl_core(r.W, r.V, r.Z, alpha, draws, rng, opts);
}

TestOutcome mdl_test_two(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                         const std::vector<Index>& group, double alpha, Index draws, RngStream& rng,
                         const BaselineOptions& opts) {
  if (XA.rows() < 10) throw ParameterError("mdl_test_two: need at least 10 observations");
  check_alpha(alpha, "mdl_test_two");
  const Convolution c = convolve(XA, YA, XB, YB, group);
  require_nonzero(c.Y, c.Z, "mdl_test_two");
  return mdl_core(c.W, c.Y, c.Z, alpha, draws, rng, opts);
}

TestOutcome wdl_test_one(const DenseMatrix& X, const DenseVector& Y, const Hypothesis& hyp, double alpha,
                         double sigma_eps, Index draws, RngStream& rng, const BaselineOptions& opts) {
  if (X.rows() < 10) throw ParameterError("wdl_test_one: need at least 10 observations");
  check_alpha(alpha, "wdl_test_one");
  if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) throw ParameterError("wdl_test_one: sigma_eps must be positive");
  if (Y.size() != X.rows()) throw ShapeError("wdl_test_one: Y length does not match X rows");
  hyp.validate(X.cols());

  const WaldParts w = wald_parts(X, Y, hyp.group, opts);
  const Index k = hyp.size();
  const double sqrt_n = std::sqrt(static_cast<double>(X.rows()));
  const DenseVector sd = w.omega.diagonal().cwiseSqrt();
  TestOutcome out;
  out.alpha = alpha;
  out.quantile_draws = draws;
  out.sigma_hat = sigma_eps;
  for (Index j = 0; j < k; ++j) {
    out.statistic = std::max(out.statistic, sqrt_n * std::abs(w.estimate(j) - hyp.beta_g0(j)) / (sigma_eps * sd(j)));
  }
  // W_j / (sigma sqrt(Omega_jj)) with W ~ N(0, sigma^2 Omega_GG) has the
  // correlation matrix of Omega_GG as covariance.
  const DenseMatrix corr = sd.cwiseInverse().asDiagonal() * w.omega * sd.cwiseInverse().asDiagonal();
  out.critical_value = gaussian_max_quantile(0.5 * (corr + corr.transpose()), alpha, draws, rng);
  out.reject = out.statistic > out.critical_value;
  return out;
}

TestOutcome wdl_test_two(const DenseMatrix& XA, const DenseVector& YA, const DenseMatrix& XB, const DenseVector& YB,
                         const std::vector<Index>& group, double alpha, double sigma_a, double sigma_b, Index draws,
                         RngStream& rng, const BaselineOptions& opts) {
  if (XA.rows() < 10) throw ParameterError("wdl_test_two: need at least 10 observations");
  check_alpha(alpha, "wdl_test_two");
  if (!(sigma_a > 0.0) || !(sigma_b > 0.0)) throw ParameterError("wdl_test_two: noise scales must be positive");
  if (XA.rows() != XB.rows() || XA.cols() != XB.cols()) throw ShapeError("wdl_test_two: samples must have identical n and p");
  if (YA.size() != XA.rows() || YB.size() != XB.rows()) throw ShapeError("wdl_test_two: response length mismatch");
  Hypothesis::zero(group).validate(XA.cols());

  const WaldParts a = wald_parts(XA, YA, group, opts);
  const WaldParts b = wald_parts(XB, YB, group, opts);
  const Index k = static_cast<Index>(group.size());
  const double sqrt_n = std::sqrt(static_cast<double>(XA.rows()));
  const DenseVector denom = sigma_a * a.omega.diagonal().cwiseSqrt() + sigma_b * b.omega.diagonal().cwiseSqrt();
  TestOutcome out;
  out.alpha = alpha;
  out.quantile_draws = draws;
  out.sigma_hat = sigma_a;
  for (Index j = 0; j < k; ++j) {
    out.statistic = std::max(out.statistic, sqrt_n * std::abs(a.estimate(j) - b.estimate(j)) / denom(j));
  }
  const DenseMatrix cov = denom.cwiseInverse().asDiagonal() *
                          (sigma_a * sigma_a * a.omega + sigma_b * sigma_b * b.omega) *
                          denom.cwiseInverse().asDiagonal();
  out.critical_value = gaussian_max_quantile(0.5 * (cov + cov.transpose()), alpha, draws, rng);
  out.reject = out.statistic > out.critical_value;
  return out;
}

}  // namespace nsinfer
