#include "shapelets/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "shapelets/preprocess.hpp"
#include "shapelets/rng.hpp"

namespace shapelets {

namespace {

constexpr double kPi = 3.14159265358979323846;

double array_median(const Eigen::ArrayXd& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

Eigen::ArrayXd moving_average(const Eigen::ArrayXd& x, Eigen::Index window) {
  const Eigen::Index n = x.size();
  const Eigen::Index half = window / 2;
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + x[i];
  }
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min(n - 1, i + half);
    out[i] = (prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)]) /
             static_cast<double>(hi - lo + 1);
  }
  return out;
}

Eigen::ArrayXd remove_line(const Eigen::ArrayXd& x) {
  const LineFit fit = fit_line(x);
  Eigen::ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = x[i] - (fit.intercept + fit.slope * static_cast<double>(i));
  }
  return out;
}

struct PatternBuilder {
  Eigen::Index len;
  double noise_level;
  Rng rng;

  // Mid-frequency texture: four sinusoids with periods in [12, 40] samples,
  // amplitudes summing to `amplitude`. Periods stay short enough that every
  // Hampel window sees real slope, which keeps clean samples off the filter.
  Eigen::ArrayXd wiggle(double amplitude) {
    constexpr int kComponents = 4;
    double periods[kComponents], phases[kComponents], amps[kComponents];
    double amp_total = 0.0;
    for (int k = 0; k < kComponents; ++k) {
      periods[k] = rng.uniform(12.0, 40.0);
      phases[k] = rng.uniform(0.0, 2.0 * kPi);
      amps[k] = rng.uniform(0.5, 1.0);
      amp_total += amps[k];
    }
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(len);
    for (int k = 0; k < kComponents; ++k) {
      const double a = amplitude * amps[k] / amp_total;
      const double omega = 2.0 * kPi / periods[k];
      for (Eigen::Index i = 0; i < len; ++i) {
        out[i] += a * std::sin(omega * static_cast<double>(i) + phases[k]);
      }
    }
    return out;
  }

  // Band-limited sensor noise: uniform draws smoothed over five samples,
  // rescaled to keep the variance of a Gaussian of `sigma`. Bounded and
  // locally correlated, so clean samples stay under the Hampel threshold
  // (pure i.i.d. noise of any shape trips the 11-sample MAD at >1%).
  Eigen::ArrayXd jitter(double sigma) {
    Eigen::ArrayXd raw(len);
    const double bound = recipe::kJitterBound * sigma * noise_level;
    for (Eigen::Index i = 0; i < len; ++i) {
      raw[i] = bound * (2.0 * rng.uniform() - 1.0);
    }
    return moving_average(raw, 5) * std::sqrt(5.0);
  }

  Eigen::ArrayXd normal_band() {
    return recipe::kBand + wiggle(recipe::kTextureAmplitude * recipe::kBand) +
           jitter(recipe::kNoiseSigma * recipe::kBand);
  }

  // Slowly wandering baseline: smoothed random walk, detrended to zero
  // slope, pinned to min kDriftFloor and range kDriftRange. The occupation
  // median is steered into the lower part of the range so the
  // peak-to-median contract holds regardless of where the walk lingers.
  Eigen::ArrayXd wander() {
    Eigen::ArrayXd walk(len);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) {
      acc += rng.gaussian();
      walk[i] = acc;
    }
    Eigen::Index smooth = std::max<Eigen::Index>(9, len / 24);
    if (smooth % 2 == 0) ++smooth;
    Eigen::ArrayXd w = remove_line(moving_average(walk, smooth));

    const double lo = w.minCoeff();
    const double hi = w.maxCoeff();
    if (hi - lo < 1e-9) {
      return Eigen::ArrayXd::Constant(len, recipe::kDriftFloor * recipe::kBand);
    }
    w = (w - lo) / (hi - lo);  // [0, 1], endpoints exact

    // Steer the occupation median to ~0.24 of the range while keeping the
    // fitted slope at zero. A monotone power map w^p sends the current
    // median exactly onto the target; detrending restores the slope and
    // shifts the median a little, so a few gentle rounds settle it.
    constexpr double kMedianTarget = 0.24;
    for (int iter = 0; iter < 12; ++iter) {
      const double med = std::clamp(array_median(w), 1e-6, 1.0 - 1e-6);
      if (med >= 0.20 && med <= 0.28) break;
      const double p = std::clamp(std::log(kMedianTarget) / std::log(med), 0.25, 4.0);
      w = w.pow(p);
      w = remove_line(w);
      const double lo2 = w.minCoeff();
      const double hi2 = w.maxCoeff();
      if (hi2 - lo2 < 1e-9) {
        return Eigen::ArrayXd::Constant(len, recipe::kDriftFloor * recipe::kBand);
      }
      w = (w - lo2) / (hi2 - lo2);
    }

    // Affine map to the documented floor and range, slope still zero.
    return recipe::kDriftFloor * recipe::kBand + w * (recipe::kDriftRange * recipe::kBand);
  }

  Eigen::ArrayXd drift_series() {
    return wander() + 0.35 * wiggle(recipe::kTextureAmplitude * recipe::kBand) +
           jitter(recipe::kNoiseSigma * recipe::kBand);
  }

  Eigen::ArrayXd build(ClassLabel label) {
    switch (label.id()) {
      case 1:  // normal
        return normal_band();
      case 2: {  // missing: short live head, then a dead channel reading zero
        const double head_fraction = rng.uniform(0.02, 0.095);
        const Eigen::Index head = static_cast<Eigen::Index>(
            std::floor(static_cast<double>(len) * head_fraction));
        Eigen::ArrayXd live = normal_band();
        Eigen::ArrayXd out = Eigen::ArrayXd::Zero(len);
        out.head(head) = live.head(head);
        return out;
      }
      case 3: {  // minor: signal collapses toward the noise floor
        Eigen::ArrayXd signal =
            recipe::kBand + wiggle(recipe::kTextureAmplitude * recipe::kBand);
        return recipe::kMinorScale * signal +
               recipe::kMinorNoiseScale * jitter(recipe::kNoiseSigma * recipe::kBand);
      }
      case 4: {  // outlier: normal plus isolated spikes
        Eigen::ArrayXd out = normal_band();
        const int count = recipe::kSpikeMin +
                          static_cast<int>(rng.bounded(recipe::kSpikeMax - recipe::kSpikeMin + 1));
        const Eigen::Index min_sep = std::max<Eigen::Index>(10, len / 100);
        std::vector<Eigen::Index> placed;
        for (int attempt = 0; attempt < 200 && static_cast<int>(placed.size()) < count; ++attempt) {
          const Eigen::Index pos = static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(len)));
          bool ok = true;
          for (Eigen::Index p : placed) {
            if (std::abs(p - pos) < min_sep) { ok = false; break; }
          }
          if (!ok) continue;
          placed.push_back(pos);
          out[pos] += recipe::kBand * rng.uniform(recipe::kSpikeLow, recipe::kSpikeHigh);
        }
        return out;
      }
      case 5: {  // square: abrupt plateau shifts, same level at both ends
        const int shifts = rng.bounded(2) == 0 ? 4 : 6;
        const int segments = shifts + 1;
        std::vector<Eigen::Index> bounds;
        for (int s = 1; s < segments; ++s) {
          const double ideal = static_cast<double>(s) / segments;
          const double offset = (rng.uniform() - 0.5) * 0.4 / segments;
          bounds.push_back(static_cast<Eigen::Index>(
              std::llround(static_cast<double>(len) * (ideal + offset))));
        }
        bounds.push_back(len);
        const bool start_high = rng.bounded(2) == 0;
        Eigen::ArrayXd levels(len);
        Eigen::Index at = 0;
        for (int s = 0; s < segments; ++s) {
          const bool high = (s % 2 == 0) == start_high;
          const double level = (high ? recipe::kSquareHighLevel : recipe::kSquareLowLevel) *
                               recipe::kBand;
          while (at < bounds[static_cast<std::size_t>(s)]) levels[at++] = level;
        }
        return levels + 0.3 * wiggle(recipe::kTextureAmplitude * recipe::kBand) +
               jitter(recipe::kNoiseSigma * recipe::kBand);
      }
      case 6: {  // trend: drift plus a ramp steep enough to dominate the range
        Eigen::ArrayXd base = drift_series();
        const double rise =
            recipe::kTrendRampFactor * recipe::kDriftRange * recipe::kBand;
        const bool upward = rng.bounded(2) == 0;
        const double denom = static_cast<double>(len - 1);
        for (Eigen::Index i = 0; i < len; ++i) {
          const double ramp = rise * static_cast<double>(i) / denom;
          base[i] += upward ? ramp : rise - ramp;
        }
        return base;
      }
      case 7:  // drift
        return drift_series();
      default:
        throw Error(ErrorCode::InvalidArgs, "unknown class id");
    }
  }
};

}  // namespace

TimeSeries generate_pattern(ClassLabel label, Eigen::Index length, std::uint64_t seed,
                            const GeneratorSpec& spec) {
  if (length < 3) {
    throw Error(ErrorCode::SeriesTooShort, "generated series length must be >= 3");
  }
  PatternBuilder builder{length, spec.noise_level,
                         Rng(derive_seed(seed, static_cast<std::uint64_t>(label.id())))};
  Eigen::ArrayXd values = builder.build(label);
  // Envelopes are nonnegative; only minor's deep noise tail can dip below.
  values = values.max(0.0);
  return TimeSeries(std::move(values), spec.sample_rate_hz);
}

LabeledDataset generate_dataset(const GeneratorSpec& spec) {
  std::size_t total = 0;
  for (const auto& [id, count] : spec.per_class_counts) {
    ClassLabel probe(id);  // validates the id range
    total += count;
  }
  if (total == 0) {
    throw Error(ErrorCode::InvalidArgs, "per-class counts must include at least one series");
  }
  std::vector<TimeSeries> series;
  std::vector<ClassLabel> labels;
  series.reserve(total);
  labels.reserve(total);
  std::uint64_t ordinal = 0;
  for (const auto& [id, count] : spec.per_class_counts) {
    const ClassLabel label(id);
    for (std::size_t i = 0; i < count; ++i, ++ordinal) {
      series.push_back(generate_pattern(label, spec.series_length,
                                        derive_seed(spec.rng_seed, ordinal), spec));
      labels.push_back(label);
    }
  }
  return LabeledDataset(std::move(series), std::move(labels));
}

GeneratorSpec balanced_spec(std::size_t per_class, Eigen::Index length, std::uint64_t seed) {
  GeneratorSpec spec;
  for (int id = 1; id <= ClassLabel::kCount; ++id) spec.per_class_counts[id] = per_class;
  spec.series_length = length;
  spec.rng_seed = seed;
  return spec;
}

std::map<int, std::size_t> realistic_counts(std::size_t total) {
  // Field proportions: trend 20%, missing 10%, square 10%, drift 2.4%,
  // outlier 1.9%, normal 48%, minor = the rest of the 52% anomalous share.
  const double t = static_cast<double>(total);
  std::map<int, std::size_t> counts;
  counts[1] = static_cast<std::size_t>(std::llround(0.48 * t));
  counts[2] = static_cast<std::size_t>(std::llround(0.10 * t));
  counts[4] = static_cast<std::size_t>(std::llround(0.019 * t));
  counts[5] = static_cast<std::size_t>(std::llround(0.10 * t));
  counts[6] = static_cast<std::size_t>(std::llround(0.20 * t));
  counts[7] = static_cast<std::size_t>(std::llround(0.024 * t));
  std::size_t assigned = 0;
  for (const auto& [id, c] : counts) assigned += c;
  if (assigned > total) {
    throw Error(ErrorCode::InvalidArgs, "total too small for the realistic mix");
  }
  counts[3] = total - assigned;
  return counts;
}

GeneratorSpec realistic_spec(std::size_t total, Eigen::Index length, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.per_class_counts = realistic_counts(total);
  spec.series_length = length;
  spec.rng_seed = seed;
  return spec;
}

ShapeFeatures shape_features(const TimeSeries& series) {
  const Eigen::ArrayXd& x = series.samples();
  const Eigen::Index n = x.size();
  ShapeFeatures f;
  f.zeros_fraction =
      static_cast<double>((x == 0.0).count()) / static_cast<double>(n);
  const double peak = x.maxCoeff();
  const double med = array_median(x);
  f.peak_to_median = med > 0.0 ? peak / med : std::numeric_limits<double>::infinity();
  const double range = peak - x.minCoeff();
  const LineFit fit = fit_line(x);
  f.slope_fraction =
      range > 0.0 ? std::abs(fit.slope) * static_cast<double>(n) / range : 0.0;

  // Steps: jumps of the windowed median, spike-proof by construction.
  const Eigen::Index gap = std::max<Eigen::Index>(6, n / 300);
  const double jump = 0.6 * recipe::kBand;
  std::vector<double> scratch;
  auto window_median = [&](Eigen::Index lo, Eigen::Index hi) {
    scratch.assign(x.data() + lo, x.data() + hi);
    auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    return *mid;
  };
  for (Eigen::Index i = gap; i + gap <= n;) {
    const double left = window_median(i - gap, i);
    const double right = window_median(i, i + gap);
    if (std::abs(right - left) > jump) {
      ++f.step_count;
      i += gap;
    } else {
      ++i;
    }
  }
  return f;
}

FeatureBounds recipe_bounds(ClassLabel label) {
  FeatureBounds b;
  switch (label.id()) {
    case 1:  // normal
      b.ratio_lo = 1.0; b.ratio_hi = 1.45;
      break;
    case 2:  // missing
      b.zeros_lo = recipe::kMissingZeroFraction; b.zeros_hi = 1.0;
      b.ratio_hi = 0.0;   // unconstrained: the median of a dead channel is 0
      b.slope_hi = 0.6;   // the live head then zeros reads as a mild ramp
      break;
    case 3:  // minor
      b.ratio_lo = 1.5; b.ratio_hi = 2.2;
      break;
    case 4:  // outlier
      b.ratio_lo = 10.0; b.ratio_hi = 1e9;
      break;
    case 5:  // square
      b.ratio_lo = 1.0; b.ratio_hi = 2.4;
      b.slope_hi = 0.35;
      b.steps_lo = 4; b.steps_hi = 6;
      break;
    case 6:  // trend
      b.ratio_lo = 1.2; b.ratio_hi = 3.4;
      b.slope_lo = 0.5; b.slope_hi = 2.0;
      b.steps_hi = 3;
      break;
    case 7:  // drift
      b.ratio_lo = 2.8; b.ratio_hi = 4.5;
      b.steps_hi = 3;
      break;
  }
  return b;
}

bool matches_drift_recipe(const TimeSeries& series) {
  const Eigen::ArrayXd& x = series.samples();
  const Eigen::Index n = x.size();
  const double range = x.maxCoeff() - x.minCoeff();
  if (range <= 0.0) return false;
  const LineFit fit = fit_line(x);
  if (std::abs(fit.slope) * static_cast<double>(n) > 0.10 * range) return false;
  Eigen::Index smooth = std::max<Eigen::Index>(9, n / 24);
  if (smooth % 2 == 0) ++smooth;
  const Eigen::ArrayXd baseline = moving_average(x, smooth);
  const double wander_range = baseline.maxCoeff() - baseline.minCoeff();
  return wander_range >= 0.45 * range;
}

TimeSeries generate_raw_vibration(ClassLabel label, Eigen::Index envelope_length,
                                  std::uint64_t seed, const GeneratorSpec& spec) {
  const TimeSeries envelope = generate_pattern(label, envelope_length, seed, spec);
  constexpr Eigen::Index kFactor = 20;  // 20 Hz raw, 1 Hz envelope
  Eigen::ArrayXd raw(envelope_length * kFactor);
  for (Eigen::Index k = 0; k < envelope_length; ++k) {
    const double level = envelope.samples()[k];
    for (Eigen::Index j = 0; j < kFactor; ++j) {
      // Carrier peaks at j = 0, so each second's peak envelope is `level`.
      raw[k * kFactor + j] =
          level * std::cos(2.0 * kPi * static_cast<double>(j) / static_cast<double>(kFactor));
    }
  }
  return TimeSeries(std::move(raw), spec.sample_rate_hz * static_cast<double>(kFactor));
}

}  // namespace shapelets
