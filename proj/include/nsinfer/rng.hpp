#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nsinfer {

/// Purpose tags for stream derivation. Data generation and critical-value
/// simulation draw from separate streams so one never perturbs the other.
enum class StreamPurpose : std::uint64_t {
  Data = 0x64617461,
  Quantile = 0x7175616e,
  PowerPoint = 0x706f7772,
};

/// Seeded pseudo-random stream. The engine is mt19937_64 (fully specified by
/// the standard); uniform and normal variates are produced here rather than
/// through std::*_distribution so the output is identical across standard
/// library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by a base seed and an ordered list of integers, e.g.
  /// (seed, rep_index, purpose).
  static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used for seed mixing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace nsinfer
