#pragma once

#include <string>
#include <vector>

#include "nsinfer/linalg.hpp"
#include "nsinfer/synthdata.hpp"

namespace nsinfer {

/// Accepts "toeplitz(r)", "identity" and "equicorrelated(r)".
CovarianceSpec parse_design(const std::string& text);

/// Sparsity entry of a grid: a count, or "p" / "n" resolved per cell.
struct SparsityValue {
  enum class Kind { Count, P, N };
  Kind kind = Kind::Count;
  Index count = 0;

  Index resolve(Index n, Index p) const;
  std::string to_string() const;
  static SparsityValue parse(const std::string& text);
};

/// A table of scenarios: shared settings plus grid axes whose cross product
/// (methods x designs x errors x sparsity x h) gives the cells.
struct ScenarioGrid {
  std::string name = "experiment";
  ScenarioConfig base;
  std::vector<Method> methods{Method::MMDS};
  std::vector<CovarianceSpec> designs{CovarianceSpec::toeplitz(0.4)};
  std::vector<ErrorDist> errors{ErrorDist::standard_normal()};
  std::vector<SparsityValue> sparsity{SparsityValue{SparsityValue::Kind::Count, 3}};
  std::vector<double> h{0.0};

  /// Cells in axis order, methods varying slowest. Throws ParameterError if
  /// any cell is invalid.
  std::vector<ScenarioConfig> expand() const;
};

/// Parses `key = value` lines; `#` starts a comment. List values are comma
/// separated (commas inside parentheses do not split). Group indices are
/// 1-based and space or comma separated. Unknown or repeated keys and
/// malformed values raise ConfigError with the line number.
ScenarioGrid parse_grid(const std::string& text);

/// Reads and parses a grid file; IoError when it cannot be read.
ScenarioGrid load_grid(const std::string& path);

enum class Scale { Desk, Paper };

Scale parse_scale(const std::string& text);

/// Desk: n = 100, p = 120, reps = 200. Paper: n = 200, p = 500, reps = 100.
void apply_scale(ScenarioGrid& grid, Scale scale);

/// One scenario in the grid file format (single-valued axes).
std::string format_scenario(const ScenarioConfig& cfg);

}  // namespace nsinfer
