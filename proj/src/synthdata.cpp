#include "nsinfer/synthdata.hpp"

#include <cmath>

#include "nsinfer/error.hpp"

namespace nsinfer {

ErrorDist ErrorDist::student_t(int df) {
  if (df < 3) throw ParameterError("student t errors need df >= 3 for finite variance, got " + std::to_string(df));
  return ErrorDist(Kind::StudentT, df);
}

ErrorDist ErrorDist::parse(const std::string& text) {
  if (text == "normal") return standard_normal();
  if (text == "noiseless") return noiseless();
  if (text.size() > 1 && text[0] == 't') {
    const std::string digits = text.substr(1);
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4) {
      return student_t(std::stoi(digits));
    }
  }
  throw ParameterError("unknown error distribution '" + text + "' (expected normal, t<df> or noiseless)");
}

double ErrorDist::scale() const {
  switch (kind_) {
    case Kind::StandardNormal:
      return 1.0;
    case Kind::StudentT:
      return std::sqrt(static_cast<double>(df_) / static_cast<double>(df_ - 2));
    case Kind::Noiseless:
      return 0.0;
  }
  return 0.0;
}

std::string ErrorDist::to_string() const {
  switch (kind_) {
    case Kind::StandardNormal:
      return "normal";
    case Kind::StudentT:
      return "t" + std::to_string(df_);
    case Kind::Noiseless:
      return "noiseless";
  }
  return "unknown";
}

DenseVector gen_beta(const BetaSpec& spec) {
  if (spec.p < 1 || spec.s < 1 || spec.s > spec.p) throw ParameterError("gen_beta: need 1 <= s <= p");
  DenseVector beta = DenseVector::Zero(spec.p);
  beta.head(spec.s).setConstant(3.0 / std::sqrt(static_cast<double>(spec.s)));
  return beta;
}

DenseVector gen_errors(const ErrorDist& dist, Index n, RngStream& rng) {
  if (n < 1) throw ParameterError("gen_errors: n must be positive");
  DenseVector e(n);
  switch (dist.kind()) {
    case ErrorDist::Kind::StandardNormal:
      for (Index i = 0; i < n; ++i) e(i) = rng.normal();
      break;
    case ErrorDist::Kind::StudentT:
      for (Index i = 0; i < n; ++i) {
        const double z = rng.normal();
        double chi2 = 0.0;
        for (int k = 0; k < dist.df(); ++k) {
          const double g = rng.normal();
          chi2 += g * g;
        }
        e(i) = z / std::sqrt(chi2 / dist.df());
      }
      break;
    case ErrorDist::Kind::Noiseless:
      e.setZero();
      break;
  }
  return e;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::MMDS:
      return "MMDS";
    case Method::MDL:
      return "MDL";
    case Method::WDL:
      return "WDL";
  }
  return "unknown";
}

std::string to_string(SampleMode m) { return m == SampleMode::OneSample ? "one_sample" : "two_sample"; }

std::string to_string(WdlSigma m) {
  switch (m) {
    case WdlSigma::True:
      return "true";
    case WdlSigma::Estimated:
      return "estimated";
    case WdlSigma::Unit:
      return "unit";
  }
  return "unknown";
}

std::string to_string(RhoMode m) { return m == RhoMode::Joint ? "joint" : "self_consistent"; }

std::string to_string(const std::optional<RhoMode>& m) { return m ? to_string(*m) : "auto"; }

Method parse_method(const std::string& text) {
  if (text == "MMDS") return Method::MMDS;
  if (text == "MDL") return Method::MDL;
  if (text == "WDL") return Method::WDL;
  throw ParameterError("unknown method '" + text + "' (expected MMDS, MDL or WDL)");
}

SampleMode parse_sample_mode(const std::string& text) {
  if (text == "one_sample") return SampleMode::OneSample;
  if (text == "two_sample") return SampleMode::TwoSample;
  throw ParameterError("unknown sample mode '" + text + "' (expected one_sample or two_sample)");
}

WdlSigma parse_wdl_sigma(const std::string& text) {
  if (text == "true") return WdlSigma::True;
  if (text == "estimated") return WdlSigma::Estimated;
  if (text == "unit") return WdlSigma::Unit;
  throw ParameterError("unknown wdl_sigma '" + text + "' (expected true, estimated or unit)");
}

RhoMode parse_rho_mode(const std::string& text) {
  if (text == "joint") return RhoMode::Joint;
  if (text == "self_consistent") return RhoMode::SelfConsistent;
  throw ParameterError("unknown rho_mode '" + text + "' (expected self_consistent or joint)");
}

std::optional<RhoMode> parse_optional_rho_mode(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_rho_mode(text);
}

void ScenarioConfig::validate() const {
  if (n < 10) throw ParameterError("scenario: n must be at least 10");
  if (p < 2) throw ParameterError("scenario: p must be at least 2");
  if (s < 1 || s > p) throw ParameterError("scenario: sparsity must satisfy 1 <= s <= p");
  const Index k = static_cast<Index>(group.size());
  if (k < 1 || k >= p) throw ParameterError("scenario: group size must satisfy 1 <= |G| < p");
  for (Index i = 0; i < k; ++i) {
    if (group[i] < 0 || group[i] >= p) throw ParameterError("scenario: group index out of range");
    if (i > 0 && group[i] <= group[i - 1]) throw ParameterError("scenario: group indices must be ascending and distinct");
  }
  if (!std::isfinite(h)) throw ParameterError("scenario: h must be finite");
  if (!(scale_c > 0.0) || !std::isfinite(scale_c)) throw ParameterError("scenario: scale_c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("scenario: alpha must lie in (0, 1)");
  if (reps < 1) throw ParameterError("scenario: reps must be at least 1");
  if (draws < 1000) throw ParameterError("scenario: draws must be at least 1000");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("scenario: eta must be nonnegative (0 = default)");
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw ParameterError("scenario: rho0 must lie in (0, 1)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("scenario: lambda must be nonnegative (0 = default)");
  if (lp_max_iters < 0) throw ParameterError("scenario: lp_max_iters must be nonnegative");
  if (design.kind() == CovarianceSpec::Kind::Equicorrelated && !(design.rho() > -1.0 / static_cast<double>(p - 1))) {
    throw ParameterError("scenario: equicorrelation below -1/(p-1)");
  }
}

RngStream data_stream(std::uint64_t seed, Index rep_index) {
  return RngStream::derive(seed, {static_cast<std::uint64_t>(rep_index), static_cast<std::uint64_t>(StreamPurpose::Data)});
}

namespace {

DenseVector shifted(DenseVector beta, const ScenarioConfig& cfg) {
  beta(cfg.group.front()) += cfg.h;
  return beta;
}

}  // namespace

OneSampleData gen_one_sample(const ScenarioConfig& cfg, Index rep_index) {
  cfg.validate();
  RngStream rng = data_stream(cfg.seed, rep_index);
  OneSampleData d;
  const DenseVector base = gen_beta({cfg.p, cfg.s});
  d.beta = shifted(base, cfg);
  d.beta_g0 = DenseVector(static_cast<Index>(cfg.group.size()));
  for (std::size_t i = 0; i < cfg.group.size(); ++i) d.beta_g0(static_cast<Index>(i)) = base(cfg.group[i]);
  d.X = sample_mvn(cholesky_psd(build_covariance(cfg.design, cfg.p)), cfg.n, rng);
  d.Y = d.X * d.beta + gen_errors(cfg.error, cfg.n, rng);
  return d;
}

TwoSampleData gen_two_sample(const ScenarioConfig& cfg, Index rep_index) {
  cfg.validate();
  RngStream rng = data_stream(cfg.seed, rep_index);
  TwoSampleData d;
  d.beta_a = gen_beta({cfg.p, cfg.s});
  d.beta_b = shifted(d.beta_a, cfg);
  d.XA = sample_mvn(cholesky_psd(build_covariance(cfg.design, cfg.p)), cfg.n, rng);
  d.YA = d.XA * d.beta_a + gen_errors(cfg.error, cfg.n, rng);
  d.XB = sample_mvn(cholesky_psd(build_covariance(cfg.design_b(), cfg.p)), cfg.n, rng);
  d.YB = d.XB * d.beta_b + gen_errors(cfg.error, cfg.n, rng);
  return d;
}

Dataset gen_dataset(const ScenarioConfig& cfg, Index rep_index) {
  if (cfg.sample_mode == SampleMode::OneSample) return gen_one_sample(cfg, rep_index);
  return gen_two_sample(cfg, rep_index);
}

}  // namespace nsinfer
