#include "nsinfer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "nsinfer/baselines.hpp"
#include "nsinfer/error.hpp"

namespace nsinfer {

int resolve_threads(int requested) {
  if (const char* env = std::getenv("NONSPARSE_INFER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(requested, 1);
}

MdsConfig scenario_mds_config(const ScenarioConfig& cfg) {
  const Index k = static_cast<Index>(cfg.group.size());
  const Index width = cfg.sample_mode == SampleMode::OneSample ? cfg.p : 2 * cfg.p - k;
  MdsConfig m;
  m.eta = cfg.eta > 0.0 ? cfg.eta : default_eta(width, cfg.n);
  m.rho0 = cfg.rho0;
  m.lp_max_iters = cfg.lp_max_iters;
  const RhoMode theta_default = cfg.sample_mode == SampleMode::OneSample ? RhoMode::SelfConsistent : RhoMode::Joint;
  m.theta_rho = cfg.theta_rho.value_or(theta_default);
  m.pi_rho = cfg.pi_rho;
  return m;
}

namespace {

double wdl_sigma(const ScenarioConfig& cfg, const DenseMatrix& X, const DenseVector& y, const BaselineOptions& opts) {
  switch (cfg.wdl_sigma) {
    case WdlSigma::True:
      return cfg.error.scale();
    case WdlSigma::Estimated:
      return estimate_noise_scale(X, y, opts);
    case WdlSigma::Unit:
      return 1.0;
  }
  return cfg.error.scale();
}

TestOutcome run_one_sample(const ScenarioConfig& cfg, const OneSampleData& d, RngStream& rng) {
  const Hypothesis hyp{cfg.group, d.beta_g0};
  BaselineOptions opts;
  opts.lambda = cfg.lambda;
  switch (cfg.method) {
    case Method::MMDS:
      return one_sample_test(d.X, d.Y, hyp, cfg.alpha, scenario_mds_config(cfg), cfg.draws, rng);
    case Method::MDL:
      return mdl_test_one(d.X, d.Y, hyp, cfg.alpha, cfg.draws, rng, opts);
    case Method::WDL: {
      const double sigma = wdl_sigma(cfg, d.X, d.Y, opts);
      return wdl_test_one(d.X, d.Y, hyp, cfg.alpha, sigma, cfg.draws, rng, opts);
    }
  }
  throw ParameterError("unknown method");
}

TestOutcome run_two_sample(const ScenarioConfig& cfg, const TwoSampleData& d, RngStream& rng) {
  BaselineOptions opts;
  opts.lambda = cfg.lambda;
  switch (cfg.method) {
    case Method::MMDS:
      return two_sample_test(d.XA, d.YA, d.XB, d.YB, cfg.group, cfg.alpha, scenario_mds_config(cfg), cfg.draws,
                             rng);
    case Method::MDL:
      return mdl_test_two(d.XA, d.YA, d.XB, d.YB, cfg.group, cfg.alpha, cfg.draws, rng, opts);
    case Method::WDL: {
      const double sa = wdl_sigma(cfg, d.XA, d.YA, opts);
      const double sb = wdl_sigma(cfg, d.XB, d.YB, opts);
      return wdl_test_two(d.XA, d.YA, d.XB, d.YB, cfg.group, cfg.alpha, sa, sb, cfg.draws, rng, opts);
    }
  }
  throw ParameterError("unknown method");
}

}  // namespace

RepOutcome run_replication(const ScenarioConfig& cfg, Index rep_index) {
  RepOutcome out;
  try {
    const Dataset data = gen_dataset(cfg, rep_index);
    RngStream rng = RngStream::derive(
        cfg.seed, {static_cast<std::uint64_t>(rep_index), static_cast<std::uint64_t>(StreamPurpose::Quantile)});
    const TestOutcome t = std::holds_alternative<OneSampleData>(data)
                              ? run_one_sample(cfg, std::get<OneSampleData>(data), rng)
                              : run_two_sample(cfg, std::get<TwoSampleData>(data), rng);
    out.reject = t.reject;
  } catch (const EstimationError& e) {
    out.failed = true;
    out.error = e.what();
  } catch (const NumericalError& e) {
    out.failed = true;
    out.error = e.what();
  } catch (const DegenerateInputError& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

ExperimentResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index reps = cfg.reps;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  const int workers = static_cast<int>(std::min<Index>(resolve_threads(opts.threads), reps));

  if (workers <= 1) {
    for (Index r = 0; r < reps; ++r) outcomes[static_cast<std::size_t>(r)] = run_replication(cfg, r + 1);
  } else {
    // Static striding: worker w handles reps w, w + workers, ...; results land
    // in their own slots, so nothing is shared but read-only config.
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (Index r = w; r < reps; r += workers) outcomes[static_cast<std::size_t>(r)] = run_replication(cfg, r + 1);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExperimentResult res;
  res.scenario = cfg;
  for (const RepOutcome& o : outcomes) {
    if (o.failed) {
      if (res.failed_reps == 0) res.first_failure = o.error;
      ++res.failed_reps;
    } else {
      ++res.completed_reps;
      if (o.reject) ++res.rejections;
    }
  }
  res.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.completed_reps == 0) {
    throw ExperimentError("every replication failed (" + std::to_string(reps) + " reps); first failure: " +
                          res.first_failure);
  }
  const double n = static_cast<double>(res.completed_reps);
  res.rejection_rate = static_cast<double>(res.rejections) / n;
  res.std_error = std::sqrt(res.rejection_rate * (1.0 - res.rejection_rate) / n);
  return res;
}

std::uint64_t power_point_seed(std::uint64_t base_seed, std::size_t index) {
  return RngStream::derive(base_seed, {static_cast<std::uint64_t>(StreamPurpose::PowerPoint),
                                       static_cast<std::uint64_t>(index)})
      .next_u64();
}

PowerCurve run_power_curve(const ScenarioConfig& base, const std::vector<double>& h_grid, const RunOptions& opts) {
  if (h_grid.empty()) throw ParameterError("run_power_curve: h grid is empty");
  for (std::size_t i = 1; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > h_grid[i - 1])) throw ParameterError("run_power_curve: h grid must be strictly increasing");
  }
  PowerCurve curve;
  curve.scenario_base = base;
  curve.h_grid = h_grid;
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    ScenarioConfig cfg = base;
    cfg.h = h_grid[i];
    cfg.seed = power_point_seed(base.seed, i);
    curve.points.push_back(run_scenario(cfg, opts));
  }
  return curve;
}

}  // namespace nsinfer
