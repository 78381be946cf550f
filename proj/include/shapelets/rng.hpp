#pragma once

#include <cmath>
#include <cstdint>

namespace shapelets {

/// Derives an independent stream seed from a master seed. Used wherever a
/// parallel unit of work (tree, series, worker) needs its own generator so
/// that results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic generator with explicit draw semantics. The standard
/// distributions are implementation-defined, so the few draws needed here
/// are spelled out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next();

  /// Uniform in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n);

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Consumes two uniforms per call.
  double gaussian();

 private:
  std::uint64_t state_;
};

}  // namespace shapelets
