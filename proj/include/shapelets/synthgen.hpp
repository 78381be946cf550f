#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>

#include "shapelets/types.hpp"

namespace shapelets {

enum class Preset { Balanced, Realistic };

struct GeneratorSpec {
  std::map<int, std::size_t> per_class_counts;  // label id -> count
  Eigen::Index series_length = 3600;
  double sample_rate_hz = 1.0;  // envelope domain
  double noise_level = 1.0;     // scales the sensor noise floor
  std::uint64_t rng_seed = 0;
};

/// Recipe constants. All values are generator contract numbers chosen to
/// look like the seven monitored data patterns; tests pin them.
namespace recipe {
inline constexpr double kBand = 1.0;              // normal envelope level
inline constexpr double kTextureAmplitude = 0.15; // mid-frequency wiggle, x kBand
inline constexpr double kNoiseSigma = 0.03;       // jitter sigma, x kBand x noise_level
inline constexpr double kJitterBound = 1.7320508075688772;  // uniform bound = sigma * sqrt(3)
inline constexpr double kMinorScale = 0.04;       // minor = normal scaled by this
inline constexpr double kMinorNoiseScale = 0.5;   // minor keeps half the noise floor
inline constexpr double kMissingZeroFraction = 0.90;  // guaranteed share of exact zeros
inline constexpr double kSpikeLow = 12.0;         // spike magnitude range, x kBand
inline constexpr double kSpikeHigh = 18.0;
inline constexpr int kSpikeMin = 1;
inline constexpr int kSpikeMax = 5;
inline constexpr double kSquareHighLevel = 2.2;   // plateau levels, x kBand
inline constexpr double kSquareLowLevel = 1.0;
inline constexpr double kDriftRange = 3.5;        // wander range, x kBand
inline constexpr double kDriftFloor = 0.3;        // wander minimum, x kBand
inline constexpr double kTrendRampFactor = 3.0;   // ramp rise = factor x wander range
}  // namespace recipe

/// Shape features the recipes are contracted to separate on. Computed on raw
/// sample values.
struct ShapeFeatures {
  double zeros_fraction = 0.0;   // share of exact zeros
  double peak_to_median = 0.0;   // max / median (inf when the median is 0)
  double slope_fraction = 0.0;   // |fitted slope| * length / (max - min)
  int step_count = 0;            // abrupt shifts of the windowed median
};

ShapeFeatures shape_features(const TimeSeries& series);

/// Documented per-class bounds on the features above. For every pair of
/// classes at least one feature has disjoint bounds; that margin is the
/// generator's learnability contract.
struct FeatureBounds {
  double zeros_lo = 0.0, zeros_hi = 0.05;
  double ratio_lo = 0.0, ratio_hi = 0.0;  // ratio_hi = 0 means unconstrained
  double slope_hi = 0.25;
  double slope_lo = 0.0;
  int steps_lo = 0, steps_hi = 1;
};
FeatureBounds recipe_bounds(ClassLabel label);

/// True when the series looks like the drift recipe: negligible fitted
/// slope and a range dominated by slow baseline wander.
bool matches_drift_recipe(const TimeSeries& series);

/// Deterministic per (class, seed, spec geometry). Emits envelope-domain
/// series at spec.sample_rate_hz.
TimeSeries generate_pattern(ClassLabel label, Eigen::Index length, std::uint64_t seed,
                            const GeneratorSpec& spec);

/// Concatenates per-class patterns in label-id order with per-series seeds
/// derived from spec.rng_seed. Byte-identical for identical (spec, seed).
LabeledDataset generate_dataset(const GeneratorSpec& spec);

/// Equal counts per class (the balanced training convention).
GeneratorSpec balanced_spec(std::size_t per_class, Eigen::Index length = 3600,
                            std::uint64_t seed = 0);

/// Counts approximating the observed field mix: ~48% normal, ~20% trend,
/// ~10% missing, ~10% square, ~2.4% drift, ~1.9% outlier, remainder minor.
std::map<int, std::size_t> realistic_counts(std::size_t total);

GeneratorSpec realistic_spec(std::size_t total, Eigen::Index length = 3600,
                             std::uint64_t seed = 0);

/// 20 Hz narrowband carrier whose one-second peak envelope reproduces the
/// class's envelope-domain pattern; feeds the preprocessing path end to end.
TimeSeries generate_raw_vibration(ClassLabel label, Eigen::Index envelope_length,
                                  std::uint64_t seed, const GeneratorSpec& spec);

}  // namespace shapelets
