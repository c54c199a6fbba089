#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsinfer/config.hpp"
#include "nsinfer/error.hpp"
#include "nsinfer/format.hpp"
#include "nsinfer/harness.hpp"
#include "nsinfer/report.hpp"

using namespace nsinfer;

namespace {

struct GridArgs {
  std::string config;
  std::string out;
  std::string scale;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

ScenarioGrid load(const GridArgs& a) {
  ScenarioGrid grid = load_grid(a.config);
  if (!a.scale.empty()) apply_scale(grid, parse_scale(a.scale));
  if (a.seed) grid.base.seed = *a.seed;
  return grid;
}

std::string label(const ScenarioConfig& c) {
  return to_string(c.method) + " " + to_string(c.sample_mode) + " " + c.design.to_string() + " " +
         c.error.to_string() + " s=" + std::to_string(c.s) + " h=" + format_double(c.h);
}

void print_result(const ExperimentResult& r) {
  std::cerr << "  " << label(r.scenario) << ": rate " << format_double(r.rejection_rate) << " ("
            << r.rejections << "/" << r.completed_reps << ", failed " << r.failed_reps << ", "
            << format_double(r.wall_time_seconds) << " s)\n";
  if (r.failed_reps > 0) std::cerr << "    first failure: " << r.first_failure << "\n";
}

int cmd_run(const GridArgs& a) {
  const ScenarioGrid grid = load(a);
  const std::vector<ScenarioConfig> cells = grid.expand();
  RunOptions opts;
  opts.threads = a.threads;
  ReportBundle bundle;
  bundle.name = grid.name;
  std::cerr << grid.name << ": " << cells.size() << " cells, " << resolve_threads(opts.threads) << " thread(s)\n";
  for (const ScenarioConfig& c : cells) {
    bundle.results.push_back(run_scenario(c, opts));
    print_result(bundle.results.back());
  }
  emit_report(bundle, a.out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int cmd_power(const GridArgs& a, const std::string& h_text) {
  ScenarioGrid grid = load(a);
  std::vector<double> h_grid;
  for (const auto& item : CLI::detail::split(h_text, ',')) {
    try {
      std::size_t used = 0;
      h_grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--h-grid expects comma-separated numbers, got '" + item + "'");
    }
  }
  grid.h = {0.0};
  RunOptions opts;
  opts.threads = a.threads;
  ReportBundle bundle;
  bundle.name = grid.name;
  for (const ScenarioConfig& base : grid.expand()) {
    std::cerr << "curve " << bundle.curves.size() + 1 << ": " << label(base) << "\n";
    bundle.curves.push_back(run_power_curve(base, h_grid, opts));
    for (const auto& r : bundle.curves.back().points) print_result(r);
  }
  emit_report(bundle, a.out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  const ReportBundle bundle = load_manifest(dir);
  emit_report(bundle, dir);
  if (!bundle.results.empty()) std::cout << results_csv(bundle.results);
  for (std::size_t i = 0; i < bundle.curves.size(); ++i) {
    std::cout << "# curve " << i + 1 << ": " << label(bundle.curves[i].scenario_base) << "\n"
              << curve_data(bundle.curves[i]);
  }
  return 0;
}

void add_grid_options(CLI::App* sub, GridArgs& a) {
  sub->add_option("--config", a.config, "Grid config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "Output directory")->required();
  sub->add_option("--scale", a.scale, "Override n, p and reps")->check(CLI::IsMember({"desk", "paper"}));
  sub->add_option("--seed", a.seed, "Override the base seed");
  sub->add_option("--threads", a.threads, "Worker threads (NONSPARSE_INFER_THREADS overrides)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group significance tests for non-sparse high-dimensional regression: Monte Carlo driver"};
  app.require_subcommand(1);

  GridArgs run_args;
  auto* run = app.add_subcommand("run", "Run every cell of a scenario grid and write tables");
  add_grid_options(run, run_args);

  GridArgs power_args;
  std::string h_grid;
  auto* power = app.add_subcommand("power", "Run a power curve over h for every cell of a grid");
  add_grid_options(power, power_args);
  power->add_option("--h-grid", h_grid, "Comma-separated, strictly increasing h values")->required();

  std::string in_dir;
  auto* report = app.add_subcommand("report", "Re-render CSV and plot files from a manifest");
  report->add_option("--in", in_dir, "Directory holding manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (power->parsed()) return cmd_power(power_args, h_grid);
    if (report->parsed()) return cmd_report(in_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
