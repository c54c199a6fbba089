#include <gtest/gtest.h>

#include <cmath>

#include "nsinfer/error.hpp"
#include "nsinfer/inference.hpp"
#include "nsinfer/synthdata.hpp"
#include "oracles.hpp"

using namespace nsinfer;

namespace {

DenseMatrix gaussian(Index n, Index q, RngStream& rng) {
  DenseMatrix M(n, q);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < q; ++j) M(i, j) = rng.normal();
  return M;
}

Hypothesis hyp(std::vector<Index> group, std::vector<double> values) {
  Hypothesis h;
  h.group = std::move(group);
  h.beta_g0 = Eigen::Map<const DenseVector>(values.data(), static_cast<Index>(values.size()));
  return h;
}

}  // namespace

TEST(Hypothesis, Validation) {
  EXPECT_NO_THROW(hyp({0, 2}, {0, 0}).validate(3));
  EXPECT_THROW(hyp({}, {}).validate(3), ParameterError);
  EXPECT_THROW(hyp({0, 1, 2}, {0, 0, 0}).validate(3), ParameterError);
  EXPECT_THROW(hyp({1, 0}, {0, 0}).validate(3), ParameterError);
  EXPECT_THROW(hyp({1, 1}, {0, 0}).validate(3), ParameterError);
  EXPECT_THROW(hyp({3}, {0}).validate(3), ParameterError);
  EXPECT_THROW(hyp({0}, {0, 1}).validate(3), ParameterError);
}

TEST(Reconstruct, ZeroShiftKeepsResponse) {
  RngStream rng(1);
  const DenseMatrix X = gaussian(8, 3, rng);
  const DenseVector Y = gaussian(8, 1, rng).col(0);
  const auto r = reconstruct(X, Y, hyp({0}, {0.0}));
  EXPECT_EQ(r.Z, X.col(0));
  EXPECT_EQ(r.W, X.rightCols(2));
  EXPECT_EQ(r.V, Y);
}

TEST(Reconstruct, ShiftSubtractsGroupColumns) {
  RngStream rng(2);
  const DenseMatrix X = gaussian(8, 3, rng);
  const DenseVector Y = gaussian(8, 1, rng).col(0);
  const auto r = reconstruct(X, Y, hyp({1, 2}, {1.0, 1.0}));
  EXPECT_LT((r.V - (Y - X.col(1) - X.col(2))).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(r.W, X.col(0));
}

TEST(Reconstruct, TrueNullLeavesComplementSignal) {
  RngStream rng(3);
  const DenseMatrix X = gaussian(20, 6, rng);
  DenseVector beta(6);
  beta << 1.0, -2.0, 0.5, 3.0, 0.0, -1.0;
  const DenseVector Y = X * beta;
  const auto r = reconstruct(X, Y, hyp({0, 1, 2}, {1.0, -2.0, 0.5}));
  EXPECT_LT((r.V - r.W * beta.tail(3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Complement, AscendingRemainder) {
  EXPECT_EQ(complement({1, 3}, 5), (std::vector<Index>{0, 2, 4}));
  EXPECT_EQ(complement({0}, 2), (std::vector<Index>{1}));
}

TEST(QuantilePosition, AvoidsRoundingUp) {
  EXPECT_EQ(quantile_position(0.05, 10000), 9499);
  EXPECT_EQ(quantile_position(0.05, 1000), 949);
  EXPECT_EQ(quantile_position(0.1, 1001), 900);  // ceil(900.9) = 901, 1-based
}

TEST(GaussianMaxQuantile, StandardNormal) {
  RngStream rng(4);
  const double q = gaussian_max_quantile(DenseMatrix::Ones(1, 1), 0.05, 100000, rng);
  EXPECT_NEAR(q, oracle::normal_quantile(0.975), 0.03);
}

TEST(GaussianMaxQuantile, IndependentTriple) {
  RngStream rng(5);
  const double q = gaussian_max_quantile(DenseMatrix::Identity(3, 3), 0.05, 100000, rng);
  EXPECT_NEAR(q, oracle::normal_quantile((1.0 + std::pow(0.95, 1.0 / 3.0)) / 2.0), 0.03);
}

TEST(GaussianMaxQuantile, DegenerateCovariance) {
  RngStream rng(6);
  EXPECT_EQ(gaussian_max_quantile(DenseMatrix::Zero(2, 2), 0.05, 1000, rng), 0.0);
  // A zero-variance coordinate does not change the quantile of the others.
  DenseMatrix cov = DenseMatrix::Zero(2, 2);
  cov(1, 1) = 4.0;
  RngStream a(7), b(7);
  EXPECT_EQ(gaussian_max_quantile(cov, 0.05, 5000, a),
            gaussian_max_quantile(DenseMatrix::Constant(1, 1, 4.0), 0.05, 5000, b));
}

TEST(GaussianMaxQuantile, NonincreasingInAlpha) {
  const DenseMatrix cov = build_covariance(CovarianceSpec::toeplitz(0.5), 4);
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.9}) {
    RngStream rng(8);  // shared draws across the grid
    const double q = gaussian_max_quantile(cov, alpha, 20000, rng);
    EXPECT_LE(q, previous) << "alpha " << alpha;
    previous = q;
  }
}

TEST(GaussianMaxQuantile, Preconditions) {
  RngStream rng(9);
  EXPECT_THROW(gaussian_max_quantile(DenseMatrix::Ones(1, 1), 0.0, 1000, rng), ParameterError);
  EXPECT_THROW(gaussian_max_quantile(DenseMatrix::Ones(1, 1), 1.0, 1000, rng), ParameterError);
  EXPECT_THROW(gaussian_max_quantile(DenseMatrix::Ones(1, 1), 0.05, 999, rng), ParameterError);
  EXPECT_THROW(gaussian_max_quantile(DenseMatrix::Ones(1, 2), 0.05, 1000, rng), ShapeError);
}

TEST(MomentTest, StatisticAndDecision) {
  RngStream rng(10);
  const DenseMatrix U = gaussian(50, 3, rng);
  const DenseVector e = gaussian(50, 1, rng).col(0);
  RngStream q(11);
  const TestOutcome out = moment_test(U, e, 0.05, 2000, q);
  const double sigma = e.norm() / std::sqrt(50.0);
  EXPECT_NEAR(out.sigma_hat, sigma, 1e-14);
  EXPECT_NEAR(out.statistic, (U.transpose() * e).cwiseAbs().maxCoeff() / (std::sqrt(50.0) * sigma), 1e-12);
  EXPECT_EQ(out.reject, out.statistic > out.critical_value);
  EXPECT_EQ(out.quantile_draws, 2000);
  EXPECT_EQ(out.alpha, 0.05);
  EXPECT_GE(out.critical_value, 0.0);
}

namespace {

struct Sample {
  DenseMatrix X;
  DenseVector Y;
  DenseVector beta;
};

Sample toeplitz_sample(Index n, Index p, Index s, std::uint64_t seed) {
  RngStream rng(seed);
  Sample d;
  d.X = sample_mvn(cholesky_psd(build_covariance(CovarianceSpec::toeplitz(0.4), p)), n, rng);
  d.beta = gen_beta({p, s});
  d.Y = d.X * d.beta;
  for (Index i = 0; i < n; ++i) d.Y(i) += rng.normal();
  return d;
}

}  // namespace

TEST(OneSampleTest, OutcomeIsConsistent) {
  const Sample d = toeplitz_sample(60, 40, 3, 12);
  RngStream q(13);
  const auto h = hyp({0, 1, 2}, {d.beta(0), d.beta(1), d.beta(2)});
  const TestOutcome out = one_sample_test(d.X, d.Y, h, 0.05, default_mds_config(40, 60), 2000, q);
  EXPECT_GE(out.statistic, 0.0);
  EXPECT_GT(out.critical_value, 0.0);
  EXPECT_GT(out.sigma_hat, 0.0);
  EXPECT_EQ(out.reject, out.statistic > out.critical_value);
}

TEST(OneSampleTest, LargeShiftRejects) {
  const Sample d = toeplitz_sample(80, 40, 40, 14);
  RngStream q(15);
  const auto h = hyp({0, 1, 2}, {d.beta(0) + 3.0, d.beta(1), d.beta(2)});
  EXPECT_TRUE(one_sample_test(d.X, d.Y, h, 0.05, default_mds_config(40, 80), 2000, q).reject);
}

TEST(OneSampleTest, GroupOrderDoesNotChangeStatistic) {
  const Sample d = toeplitz_sample(50, 30, 30, 16);
  DenseMatrix swapped = d.X;
  swapped.col(0).swap(swapped.col(2));
  const auto h = hyp({0, 1, 2}, {0.0, 0.0, 0.0});
  const auto cfg = default_mds_config(30, 50);
  RngStream q1(17), q2(17);
  const TestOutcome a = one_sample_test(d.X, d.Y, h, 0.05, cfg, 2000, q1);
  const TestOutcome b = one_sample_test(swapped, d.Y, h, 0.05, cfg, 2000, q2);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.sigma_hat, b.sigma_hat);
}

TEST(OneSampleTest, Deterministic) {
  const Sample d = toeplitz_sample(50, 30, 3, 18);
  const auto h = hyp({0, 1, 2}, {d.beta(0), d.beta(1), d.beta(2)});
  RngStream q1(19), q2(19);
  const auto a = one_sample_test(d.X, d.Y, h, 0.05, default_mds_config(30, 50), 2000, q1);
  const auto b = one_sample_test(d.X, d.Y, h, 0.05, default_mds_config(30, 50), 2000, q2);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.critical_value, b.critical_value);
}

TEST(OneSampleTest, DegenerateInputs) {
  RngStream rng(20);
  DenseMatrix X = gaussian(20, 5, rng);
  const auto cfg = default_mds_config(5, 20);
  RngStream q(21);
  // V = Y - X_G beta0 = 0.
  const DenseVector Y = X.col(0) * 2.0;
  EXPECT_THROW(one_sample_test(X, Y, hyp({0}, {2.0}), 0.05, cfg, 1000, q), DegenerateInputError);
  DenseMatrix Xz = X;
  Xz.col(1).setZero();
  EXPECT_THROW(one_sample_test(Xz, DenseVector::Ones(20), hyp({1}, {0.0}), 0.05, cfg, 1000, q),
               DegenerateInputError);
  EXPECT_THROW(one_sample_test(X.topRows(9), DenseVector::Ones(9), hyp({0}, {0.0}), 0.05, cfg, 1000, q),
               ParameterError);
  EXPECT_THROW(one_sample_test(X, DenseVector::Ones(19), hyp({0}, {0.0}), 0.05, cfg, 1000, q), ShapeError);
}

TEST(Convolve, EqualSamplesCancel) {
  RngStream rng(22);
  const DenseMatrix X = gaussian(10, 4, rng);
  const DenseVector Y = gaussian(10, 1, rng).col(0);
  const auto c = convolve(X, Y, X, Y, {1, 2});
  EXPECT_EQ(c.Z, DenseMatrix::Zero(10, 2));
  EXPECT_EQ(c.W.cols(), 2 + 2 * 2);
  EXPECT_EQ(c.Y, 2.0 * Y);
}

TEST(Convolve, ColumnLayout) {
  RngStream rng(23);
  const DenseMatrix XA = gaussian(6, 2, rng);
  const DenseMatrix XB = gaussian(6, 2, rng);
  const DenseVector YA = gaussian(6, 1, rng).col(0);
  const DenseVector YB = gaussian(6, 1, rng).col(0);
  const auto c = convolve(XA, YA, XB, YB, {0});
  ASSERT_EQ(c.W.cols(), 3);
  EXPECT_EQ(DenseVector(c.W.col(0)), DenseVector(XA.col(0) + XB.col(0)));
  EXPECT_EQ(DenseVector(c.W.col(1)), DenseVector(XA.col(1)));
  EXPECT_EQ(DenseVector(c.W.col(2)), DenseVector(XB.col(1)));
  EXPECT_EQ(DenseVector(c.Z.col(0)), DenseVector(XA.col(0) - XB.col(0)));
  EXPECT_EQ(c.Y, YA + YB);
}

TEST(Convolve, NoiselessIdentity) {
  RngStream rng(24);
  const Index n = 15, p = 7;
  const DenseMatrix XA = gaussian(n, p, rng);
  const DenseMatrix XB = gaussian(n, p, rng);
  const DenseVector beta = gaussian(p, 1, rng).col(0);
  const std::vector<Index> group{1, 4};
  const auto c = convolve(XA, XA * beta, XB, XB * beta, group);
  const std::vector<Index> rest = complement(group, p);
  DenseVector theta(2 + 2 * 5);
  for (Index j = 0; j < 2; ++j) theta(j) = beta(group[j]);
  for (Index j = 0; j < 5; ++j) {
    theta(2 + j) = beta(rest[j]);
    theta(7 + j) = beta(rest[j]);
  }
  EXPECT_LT((c.Y - c.W * theta).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Convolve, RejectsMismatchedSamples) {
  RngStream rng(25);
  const DenseMatrix XA = gaussian(10, 4, rng);
  const DenseMatrix XB = gaussian(11, 4, rng);
  EXPECT_THROW(convolve(XA, DenseVector::Ones(10), XB, DenseVector::Ones(11), {0}), ShapeError);
  EXPECT_THROW(convolve(XA, DenseVector::Ones(10), XA.leftCols(3), DenseVector::Ones(10), {0}), ShapeError);
}

TEST(TwoSampleTest, OutcomeAndDegenerateInput) {
  RngStream rng(26);
  const Index n = 40, p = 15;
  const DenseMatrix XA = gaussian(n, p, rng);
  const DenseMatrix XB = std::sqrt(2.0) * gaussian(n, p, rng);
  const DenseVector beta = gen_beta({p, p});
  DenseVector YA = XA * beta, YB = XB * beta;
  for (Index i = 0; i < n; ++i) {
    YA(i) += rng.normal();
    YB(i) += rng.normal();
  }
  const auto cfg = default_mds_config(2 * p - 3, n);
  RngStream q(27);
  const TestOutcome out = two_sample_test(XA, YA, XB, YB, {0, 1, 2}, 0.05, cfg, 2000, q);
  EXPECT_GE(out.statistic, 0.0);
  EXPECT_EQ(out.reject, out.statistic > out.critical_value);
  EXPECT_THROW(two_sample_test(XA, YA, XA, YA, {0, 1, 2}, 0.05, cfg, 2000, q), DegenerateInputError);
}
