#pragma once

#include <string>
#include <vector>

#include "nsinfer/harness.hpp"

namespace nsinfer {

/// Everything one CLI invocation produced.
struct ReportBundle {
  std::string name = "experiment";
  std::vector<ExperimentResult> results;  ///< table cells
  std::vector<PowerCurve> curves;
};

/// CSV header and rows, RFC-4180 (CRLF line ends, fields quoted when they
/// contain a comma, quote or line break). Columns: method, design,
/// error_dist, n, p, s, h, alpha, reps, rejection_rate, std_error,
/// failed_reps, seed, wall_time_seconds.
std::string results_csv(const std::vector<ExperimentResult>& results);

/// "h rejection_rate" lines sorted by h, no header.
std::string curve_data(const PowerCurve& curve);

/// Writes into out_dir (created if missing):
///   <name>.csv               table cells, when there are any
///   <name>_power.csv         every power-curve point, when there are curves
///   <name>_curve<i>.dat      one plot file per curve
///   manifest.json            full scenarios, results and software version
/// Throws IoError when a file cannot be written and ParameterError for an
/// empty bundle.
void emit_report(const ReportBundle& bundle, const std::string& out_dir);

/// JSON text of the manifest and its inverse.
std::string manifest_json(const ReportBundle& bundle);
ReportBundle parse_manifest(const std::string& text);

/// Reads out_dir/manifest.json; IoError when missing or malformed.
ReportBundle load_manifest(const std::string& dir);

}  // namespace nsinfer
