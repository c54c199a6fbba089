#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nsinfer/linalg.hpp"
#include "nsinfer/mds.hpp"
#include "nsinfer/rng.hpp"

namespace nsinfer {

/// Error law of the regression noise. t-variates are raw (variance df/(df-2)).
/// Noiseless is a test hook producing exact zeros.
class ErrorDist {
 public:
  enum class Kind { StandardNormal, StudentT, Noiseless };

  static ErrorDist standard_normal() { return ErrorDist(Kind::StandardNormal, 0); }
  static ErrorDist student_t(int df);
  static ErrorDist noiseless() { return ErrorDist(Kind::Noiseless, 0); }

  /// Accepts "normal", "t<df>" (e.g. "t3") and "noiseless".
  static ErrorDist parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  int df() const noexcept { return df_; }

  /// Population standard deviation: 1, sqrt(df / (df - 2)) or 0.
  double scale() const;

  std::string to_string() const;

  friend bool operator==(const ErrorDist& a, const ErrorDist& b) { return a.kind_ == b.kind_ && a.df_ == b.df_; }

 private:
  ErrorDist(Kind kind, int df) : kind_(kind), df_(df) {}
  Kind kind_;
  int df_;
};

/// beta_j = 3 / sqrt(s) for the first s coordinates, 0 elsewhere.
struct BetaSpec {
  Index p = 0;
  Index s = 0;
};

DenseVector gen_beta(const BetaSpec& spec);

DenseVector gen_errors(const ErrorDist& dist, Index n, RngStream& rng);

enum class Method { MMDS, MDL, WDL };
enum class SampleMode { OneSample, TwoSample };
/// Noise scale handed to WDL: the population value of the error law, a
/// residual estimate, or 1 whatever the law.
enum class WdlSigma { True, Estimated, Unit };

std::string to_string(Method m);
std::string to_string(SampleMode m);
std::string to_string(WdlSigma m);
std::string to_string(RhoMode m);
/// "auto" for an unset mode.
std::string to_string(const std::optional<RhoMode>& m);
Method parse_method(const std::string& text);
SampleMode parse_sample_mode(const std::string& text);
WdlSigma parse_wdl_sigma(const std::string& text);
RhoMode parse_rho_mode(const std::string& text);
/// Also accepts "auto", mapped to an unset mode.
std::optional<RhoMode> parse_optional_rho_mode(const std::string& text);

/// One Monte Carlo cell. Group indices are 0-based here.
struct ScenarioConfig {
  Index n = 100;
  Index p = 120;
  CovarianceSpec design = CovarianceSpec::toeplitz(0.4);
  ErrorDist error = ErrorDist::standard_normal();
  Index s = 3;
  std::vector<Index> group{0, 1, 2};
  double h = 0.0;
  Method method = Method::MMDS;
  SampleMode sample_mode = SampleMode::OneSample;
  double scale_c = 2.0;  ///< Sigma_B = c * Sigma_A in two-sample mode
  double alpha = 0.05;
  Index reps = 200;
  std::uint64_t seed = 1;
  Index draws = 10000;

  double eta = 0.0;     ///< 0 selects 0.5 sqrt(log(width) / n)
  double rho0 = 0.01;
  double lambda = 0.0;  ///< 0 selects sqrt(log(width) / n)
  WdlSigma wdl_sigma = WdlSigma::True;
  Index lp_max_iters = 0;
  /// Unset ("auto"): self-consistent for one sample, joint for two samples.
  std::optional<RhoMode> theta_rho;
  RhoMode pi_rho = RhoMode::SelfConsistent;

  /// Throws ParameterError on any violated invariant.
  void validate() const;

  /// Covariance of the second sample's design.
  CovarianceSpec design_b() const { return CovarianceSpec::scaled(design, scale_c); }
};

struct OneSampleData {
  DenseMatrix X;
  DenseVector Y;
  DenseVector beta;     ///< coefficients used to generate Y
  DenseVector beta_g0;  ///< null value of beta_G
};

struct TwoSampleData {
  DenseMatrix XA;
  DenseVector YA;
  DenseMatrix XB;
  DenseVector YB;
  DenseVector beta_a;
  DenseVector beta_b;
};

using Dataset = std::variant<OneSampleData, TwoSampleData>;

/// Data stream of a replication: derived from (seed, rep_index, Data).
RngStream data_stream(std::uint64_t seed, Index rep_index);

/// One-sample: X ~ N(0, Sigma), beta from gen_beta with the shift h added to
/// the first group coordinate, Y = X beta + eps; the null value is the
/// unshifted beta_G. Two-sample: X_A ~ N(0, Sigma), X_B ~ N(0, c Sigma),
/// beta_B = beta_A + h e_{g1}, independent errors.
Dataset gen_dataset(const ScenarioConfig& cfg, Index rep_index);

OneSampleData gen_one_sample(const ScenarioConfig& cfg, Index rep_index);
TwoSampleData gen_two_sample(const ScenarioConfig& cfg, Index rep_index);

}  // namespace nsinfer
