#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nsinfer/error.hpp"
#include "nsinfer/synthdata.hpp"
#include "oracles.hpp"

using namespace nsinfer;

namespace {

ScenarioConfig small(SampleMode mode) {
  ScenarioConfig c;
  c.n = 40;
  c.p = 12;
  c.sample_mode = mode;
  c.reps = 1;
  c.draws = 1000;
  return c;
}

}  // namespace

TEST(GenBeta, EqualMassOnLeadingCoordinates) {
  const DenseVector b3 = gen_beta({6, 3});
  const double v = 3.0 / std::sqrt(3.0);
  DenseVector expected(6);
  expected << v, v, v, 0, 0, 0;
  EXPECT_EQ(b3, expected);
  const DenseVector dense = gen_beta({4, 4});
  EXPECT_EQ(dense, DenseVector::Constant(4, 1.5));
  EXPECT_DOUBLE_EQ(gen_beta({100, 100}).squaredNorm(), 9.0);
  EXPECT_THROW(gen_beta({4, 5}), ParameterError);
  EXPECT_THROW(gen_beta({4, 0}), ParameterError);
}

TEST(GenErrors, NormalAndStudentMoments) {
  RngStream rng(1);
  const Index n = 200000;
  const DenseVector z = gen_errors(ErrorDist::standard_normal(), n, rng);
  EXPECT_NEAR(z.mean(), 0.0, 0.01);
  EXPECT_NEAR(z.squaredNorm() / n, 1.0, 0.02);

  const ErrorDist t5 = ErrorDist::student_t(5);
  const DenseVector t = gen_errors(t5, n, rng);
  EXPECT_NEAR(t.mean(), 0.0, 0.02);
  EXPECT_NEAR(t.squaredNorm() / n, 5.0 / 3.0, 0.08);
  EXPECT_DOUBLE_EQ(t5.scale(), std::sqrt(5.0 / 3.0));

  // t3 has infinite fourth moment; the median of |t3| is 0.7649.
  DenseVector a = gen_errors(ErrorDist::student_t(3), 20001, rng).cwiseAbs();
  std::sort(a.data(), a.data() + a.size());
  EXPECT_NEAR(a(10000), 0.7649, 0.03);

  EXPECT_EQ(gen_errors(ErrorDist::noiseless(), 5, rng), DenseVector::Zero(5));
  EXPECT_THROW(gen_errors(ErrorDist::standard_normal(), 0, rng), ParameterError);
}

TEST(ErrorDist, TextRoundTrip) {
  for (const std::string text : {"normal", "t3", "t10", "noiseless"}) {
    EXPECT_EQ(ErrorDist::parse(text).to_string(), text);
  }
  EXPECT_EQ(ErrorDist::parse("t3"), ErrorDist::student_t(3));
  EXPECT_THROW(ErrorDist::parse("t2"), ParameterError);
  EXPECT_THROW(ErrorDist::parse("cauchy"), ParameterError);
  EXPECT_THROW(ErrorDist::student_t(1), ParameterError);
}

TEST(Enums, TextRoundTrip) {
  for (Method m : {Method::MMDS, Method::MDL, Method::WDL}) EXPECT_EQ(parse_method(to_string(m)), m);
  for (SampleMode m : {SampleMode::OneSample, SampleMode::TwoSample}) EXPECT_EQ(parse_sample_mode(to_string(m)), m);
  for (WdlSigma m : {WdlSigma::True, WdlSigma::Estimated, WdlSigma::Unit}) EXPECT_EQ(parse_wdl_sigma(to_string(m)), m);
  for (RhoMode m : {RhoMode::Joint, RhoMode::SelfConsistent}) EXPECT_EQ(parse_rho_mode(to_string(m)), m);
  EXPECT_EQ(to_string(std::optional<RhoMode>{}), "auto");
  EXPECT_FALSE(parse_optional_rho_mode("auto").has_value());
  EXPECT_EQ(parse_optional_rho_mode("joint"), RhoMode::Joint);
  EXPECT_THROW(parse_method("lasso"), ParameterError);
  EXPECT_THROW(parse_rho_mode("auto"), ParameterError);
}

TEST(ScenarioConfig, Validation) {
  EXPECT_NO_THROW(ScenarioConfig{}.validate());
  auto broken = [](auto mutate) {
    ScenarioConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.n = 5; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.s = 121; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.group = {}; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.group = {2, 1}; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.group = {0, 200}; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.alpha = 1.0; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.draws = 10; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.scale_c = 0.0; }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.h = std::nan(""); }).validate(), ParameterError);
  EXPECT_THROW(broken([](ScenarioConfig& c) { c.design = CovarianceSpec::equicorrelated(-0.5); }).validate(),
               ParameterError);
}

TEST(GenOneSample, NoiselessResponseIsExact) {
  ScenarioConfig c = small(SampleMode::OneSample);
  c.error = ErrorDist::noiseless();
  c.s = 5;
  c.h = 0.7;
  const OneSampleData d = gen_one_sample(c, 1);
  EXPECT_EQ(d.Y, d.X * d.beta);
  DenseVector expected = gen_beta({c.p, c.s});
  EXPECT_EQ(d.beta_g0, expected.head(3));
  expected(0) += 0.7;
  EXPECT_EQ(d.beta, expected);
}

TEST(GenOneSample, DeterministicPerSeedAndReplication) {
  const ScenarioConfig c = small(SampleMode::OneSample);
  const OneSampleData a = gen_one_sample(c, 3);
  const OneSampleData b = gen_one_sample(c, 3);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.Y, b.Y);
  EXPECT_NE(gen_one_sample(c, 4).X, a.X);
  ScenarioConfig other = c;
  other.seed = 2;
  EXPECT_NE(gen_one_sample(other, 3).X, a.X);
  // The shift moves only the response, never the design draw.
  ScenarioConfig shifted = c;
  shifted.h = 1.0;
  EXPECT_EQ(gen_one_sample(shifted, 3).X, a.X);
}

TEST(GenOneSample, ShiftGoesToFirstGroupIndex) {
  ScenarioConfig c = small(SampleMode::OneSample);
  c.group = {4, 7};
  c.h = 2.0;
  const OneSampleData d = gen_one_sample(c, 1);
  DenseVector expected = gen_beta({c.p, c.s});
  expected(4) += 2.0;
  EXPECT_EQ(d.beta, expected);
  EXPECT_EQ(d.beta_g0, DenseVector::Zero(2));
}

TEST(GenTwoSample, NullSharesCoefficients) {
  ScenarioConfig c = small(SampleMode::TwoSample);
  const TwoSampleData d = gen_two_sample(c, 1);
  EXPECT_EQ(d.beta_a, d.beta_b);
  c.h = 0.5;
  const TwoSampleData s = gen_two_sample(c, 1);
  EXPECT_DOUBLE_EQ(s.beta_b(0) - s.beta_a(0), 0.5);
  EXPECT_EQ(s.beta_b.tail(c.p - 1), s.beta_a.tail(c.p - 1));
  EXPECT_TRUE(std::holds_alternative<TwoSampleData>(gen_dataset(c, 1)));
}

TEST(GenTwoSample, SecondDesignIsScaled) {
  ScenarioConfig c;
  c.sample_mode = SampleMode::TwoSample;
  c.n = 20000;
  c.p = 4;
  c.group = {0};
  c.s = 2;
  c.scale_c = 2.0;
  const TwoSampleData d = gen_two_sample(c, 1);
  const DenseMatrix sa = oracle::empirical_covariance(d.XA);
  const DenseMatrix sb = oracle::empirical_covariance(d.XB);
  const DenseMatrix sigma = build_covariance(c.design, c.p);
  EXPECT_LT((sa - sigma).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT((sb - 2.0 * sigma).cwiseAbs().maxCoeff(), 0.1);
}
