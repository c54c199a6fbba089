#pragma once

#include <string>
#include <vector>

#include "nsinfer/inference.hpp"
#include "nsinfer/synthdata.hpp"

namespace nsinfer {

struct ExperimentResult {
  ScenarioConfig scenario;
  Index rejections = 0;
  Index completed_reps = 0;
  Index failed_reps = 0;
  double rejection_rate = 0.0;  ///< rejections / completed_reps
  double std_error = 0.0;       ///< binomial, sqrt(rate (1 - rate) / completed_reps)
  double wall_time_seconds = 0.0;
  std::string first_failure;  ///< message of the lowest-index failed replication
};

struct PowerCurve {
  ScenarioConfig scenario_base;
  std::vector<double> h_grid;
  std::vector<ExperimentResult> points;
};

struct RunOptions {
  int threads = 1;
};

/// Worker count: NONSPARSE_INFER_THREADS when set to a positive integer,
/// otherwise `requested` (at least 1).
int resolve_threads(int requested);

/// Outcome of one replication.
struct RepOutcome {
  bool failed = false;
  bool reject = false;
  std::string error;
};

/// Generates replication `rep_index` and runs the configured method on it.
/// Estimation, numerical and degenerate-input failures are reported in the
/// outcome; any other exception propagates.
RepOutcome run_replication(const ScenarioConfig& cfg, Index rep_index);

/// Replications 1..reps, spread over worker threads. Tallies are integers,
/// so the result does not depend on the thread count. Throws
/// ExperimentError when every replication fails.
ExperimentResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Seed used for grid point `index` of a power curve.
std::uint64_t power_point_seed(std::uint64_t base_seed, std::size_t index);

/// One run_scenario per h (strictly increasing grid), each with h substituted
/// and its own derived seed.
PowerCurve run_power_curve(const ScenarioConfig& base, const std::vector<double>& h_grid,
                           const RunOptions& opts = {});

/// MDS tuning of a scenario: eta defaults to 0.5 sqrt(log(width) / n), width
/// being p (one sample) or 2p - k (two samples); an unset theta_rho resolves
/// to self-consistent for one sample and joint for two samples.
MdsConfig scenario_mds_config(const ScenarioConfig& cfg);

}  // namespace nsinfer
