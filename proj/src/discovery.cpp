#include "shapelets/discovery.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include "shapelets/parallel.hpp"
#include "shapelets/preprocess.hpp"
#include "shapelets/rng.hpp"

namespace shapelets {

namespace {

Eigen::Index resolved_max_len(const DiscoveryConfig& cfg, Eigen::Index series_length) {
  const Eigen::Index m = cfg.max_len > 0 ? std::min(cfg.max_len, series_length) : series_length;
  return m;
}

void check_config(const DiscoveryConfig& cfg) {
  if (cfg.min_len < 3) {
    throw Error(ErrorCode::InvalidArgs, "min_len must be >= 3, the minimum meaningful length");
  }
  if (cfg.max_len > 0 && cfg.max_len < cfg.min_len) {
    throw Error(ErrorCode::InvalidArgs, "max_len must be >= min_len");
  }
  if (cfg.ig_threshold < 0.0) {
    throw Error(ErrorCode::InvalidArgs, "ig_threshold must be >= 0");
  }
  if (cfg.len_stride < 1 || cfg.pos_stride < 1) {
    throw Error(ErrorCode::InvalidArgs, "strides must be >= 1");
  }
  if (!(cfg.candidate_sample_fraction > 0.0) || cfg.candidate_sample_fraction > 1.0) {
    throw Error(ErrorCode::InvalidArgs, "candidate_sample_fraction must be in (0, 1]");
  }
}

}  // namespace

void generate_candidates(Eigen::Index series_length, const DiscoveryConfig& cfg,
                         std::uint64_t sampling_seed,
                         const std::function<void(Window)>& sink) {
  check_config(cfg);
  if (cfg.min_len > series_length) {
    throw Error(ErrorCode::MinLenExceedsSeries,
                "min_len " + std::to_string(cfg.min_len) + " exceeds series length " +
                    std::to_string(series_length));
  }
  const Eigen::Index max_len = resolved_max_len(cfg, series_length);
  const bool sampled = cfg.candidate_sample_fraction < 1.0;
  Rng rng(sampling_seed);
  for (Eigen::Index len = cfg.min_len; len <= max_len; len += cfg.len_stride) {
    for (Eigen::Index start = 0; start + len <= series_length; start += cfg.pos_stride) {
      if (sampled && rng.uniform() >= cfg.candidate_sample_fraction) continue;
      sink(Window{start, len});
    }
  }
}

std::vector<Window> candidate_windows(const TimeSeries& series, const DiscoveryConfig& cfg,
                                      std::uint64_t sampling_seed) {
  std::vector<Window> out;
  generate_candidates(series.length(), cfg, sampling_seed,
                      [&out](Window w) { out.push_back(w); });
  return out;
}

namespace {

// Reference evaluation of one window through the same z-normalization the
// rest of the library uses. Bit-exact zero on a true self-match.
double exact_window_distance(const Eigen::Ref<const Eigen::ArrayXd>& shapelet_values,
                             const TimeSeries& series, Eigen::Index start) {
  const Eigen::Index l = shapelet_values.size();
  const Eigen::ArrayXd z = z_normalize(series.samples().segment(start, l));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l; ++i) {
    const double diff = shapelet_values[i] - z[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

double subsequence_distance(const Eigen::Ref<const Eigen::ArrayXd>& shapelet_values,
                            const TimeSeries& series, const DistanceOptions& opts) {
  const Eigen::Index l = shapelet_values.size();
  const Eigen::Index m = series.length();
  if (l > m) {
    throw Error(ErrorCode::ShapeletLongerThanSeries,
                "shapelet length " + std::to_string(l) + " exceeds series length " +
                    std::to_string(m));
  }
  const double* x = series.samples().data();
  const double* s = shapelet_values.data();
  double best = std::numeric_limits<double>::infinity();

  if (opts.znormalize) {
    // Prefix sums give each window's mean/std in O(1). They carry rounding
    // from preceding samples, so the scan is a screen: whenever a window
    // takes the lead it is re-evaluated through exact_window_distance.
    thread_local std::vector<double> sum1, sum2;
    sum1.resize(static_cast<std::size_t>(m) + 1);
    sum2.resize(static_cast<std::size_t>(m) + 1);
    sum1[0] = sum2[0] = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      sum1[static_cast<std::size_t>(i) + 1] = sum1[static_cast<std::size_t>(i)] + x[i];
      sum2[static_cast<std::size_t>(i) + 1] = sum2[static_cast<std::size_t>(i)] + x[i] * x[i];
    }
    const double len = static_cast<double>(l);
    const double shapelet_sq = shapelet_values.square().sum();
    for (Eigen::Index p = 0; p + l <= m; ++p) {
      const double mean = (sum1[static_cast<std::size_t>(p + l)] - sum1[static_cast<std::size_t>(p)]) / len;
      const double ex2 = (sum2[static_cast<std::size_t>(p + l)] - sum2[static_cast<std::size_t>(p)]) / len;
      const double var = std::max(ex2 - mean * mean, 0.0);
      const double sigma = std::sqrt(var);
      double d;
      if (sigma < kSigmaFloor) {
        // Constant window z-normalizes to zeros.
        d = shapelet_sq;
      } else {
        const double inv = 1.0 / sigma;
        double acc = 0.0;
        bool abandoned = false;
        for (Eigen::Index i = 0; i < l; ++i) {
          const double diff = s[i] - (x[p + i] - mean) * inv;
          acc += diff * diff;
          if (opts.early_abandon && acc > best) {
            abandoned = true;
            break;
          }
        }
        if (abandoned) continue;
        d = acc;
      }
      if (d < best) best = std::min(best, exact_window_distance(shapelet_values, series, p));
    }
  } else {
    for (Eigen::Index p = 0; p + l <= m; ++p) {
      double acc = 0.0;
      bool abandoned = false;
      for (Eigen::Index i = 0; i < l; ++i) {
        const double diff = s[i] - x[p + i];
        acc += diff * diff;
        if (opts.early_abandon && acc > best) {
          abandoned = true;
          break;
        }
      }
      if (!abandoned && acc < best) best = acc;
    }
  }
  if (opts.length_normalize) best /= static_cast<double>(l);
  return best;
}

Orderline build_orderline(const Shapelet& shapelet, const LabeledDataset& dataset,
                          const DistanceOptions& opts, bool exclude_source) {
  Orderline line;
  line.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (exclude_source && i == shapelet.source_series_index) continue;
    line.push_back(OrderlineEntry{subsequence_distance(shapelet.values, dataset.series(i), opts),
                                  dataset.label(i)});
  }
  std::stable_sort(line.begin(), line.end(),
                   [](const OrderlineEntry& a, const OrderlineEntry& b) {
                     return a.distance < b.distance;
                   });
  return line;
}

double entropy(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  if (total == 0) {
    throw Error(ErrorCode::EmptyPartition, "entropy of an empty partition is undefined");
  }
  double h = 0.0;
  for (std::size_t c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

SplitQuality best_info_gain(const Orderline& orderline) {
  const std::size_t n = orderline.size();
  if (n == 0) return SplitQuality{0.0, 0.0};

  std::array<std::size_t, ClassLabel::kCount> total_counts{};
  for (const auto& e : orderline) total_counts[static_cast<std::size_t>(e.label.id() - 1)]++;

  int distinct_labels = 0;
  for (std::size_t c : total_counts) distinct_labels += c > 0 ? 1 : 0;
  if (n < 2 || distinct_labels < 2) {
    return SplitQuality{0.0, orderline.front().distance};
  }

  const double h_total = entropy(total_counts);
  std::array<std::size_t, ClassLabel::kCount> left{};
  SplitQuality best{0.0, orderline.front().distance};
  bool found = false;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 1; i < n; ++i) {
    left[static_cast<std::size_t>(orderline[i - 1].label.id() - 1)]++;
    // Ties in distance admit no split between them.
    if (!(orderline[i].distance > orderline[i - 1].distance)) continue;
    std::array<std::size_t, ClassLabel::kCount> right{};
    for (std::size_t c = 0; c < right.size(); ++c) right[c] = total_counts[c] - left[c];
    const double w_left = static_cast<double>(i) / nn;
    const double gain = h_total - (w_left * entropy(left) + (1.0 - w_left) * entropy(right));
    if (!found || gain > best.info_gain) {
      best.info_gain = gain;
      best.threshold = 0.5 * (orderline[i - 1].distance + orderline[i].distance);
      found = true;
    }
  }
  if (!found) {
    // All distances identical: no split point exists.
    return SplitQuality{0.0, orderline.front().distance};
  }
  return best;
}

namespace {

struct ScoredCandidate {
  std::size_t source = 0;
  Window window;
  double info_gain = 0.0;
  double threshold = 0.0;
};

// Deterministic preference order: higher gain, then shorter, then earlier
// source series, then earlier start.
bool better_than(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.info_gain != b.info_gain) return a.info_gain > b.info_gain;
  if (a.window.length != b.window.length) return a.window.length < b.window.length;
  if (a.source != b.source) return a.source < b.source;
  return a.window.start < b.window.start;
}

bool overlaps_majority(const Window& a, const Window& b) {
  const Eigen::Index lo = std::max(a.start, b.start);
  const Eigen::Index hi = std::min(a.start + a.length, b.start + b.length);
  const Eigen::Index overlap = std::max<Eigen::Index>(0, hi - lo);
  return 2 * overlap > std::min(a.length, b.length);
}

Eigen::ArrayXd candidate_values(const TimeSeries& series, const Window& w, bool znormalize) {
  Eigen::ArrayXd raw = series.samples().segment(w.start, w.length);
  return znormalize ? z_normalize(raw) : raw;
}

}  // namespace

std::vector<Shapelet> discover_shapelets(const LabeledDataset& dataset,
                                         const DiscoveryConfig& cfg,
                                         DiscoveryStats* stats) {
  check_config(cfg);
  validate_dataset(dataset);
  const std::size_t n = dataset.size();
  const std::size_t max_total = cfg.max_shapelets > 0 ? cfg.max_shapelets : 10 * n;
  const int num_classes = dataset.class_count();
  const std::size_t per_class =
      cfg.per_class_cap > 0 ? cfg.per_class_cap
                            : std::max<std::size_t>(1, max_total / static_cast<std::size_t>(num_classes));
  const DistanceOptions dist_opts = cfg.distance_options();

  const auto t0 = std::chrono::steady_clock::now();
  const auto budget_exceeded = [&]() {
    if (cfg.time_budget_seconds <= 0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    return elapsed.count() > cfg.time_budget_seconds;
  };

  DiscoveryStats local_stats;
  DiscoveryStats& st = stats ? *stats : local_stats;
  st = DiscoveryStats{};

  std::vector<ScoredCandidate> kept;
  for (std::size_t src = 0; src < n; ++src) {
    const TimeSeries& series = dataset.series(src);
    if (cfg.min_len > series.length()) {
      throw Error(ErrorCode::MinLenExceedsSeries,
                  "min_len exceeds the length of series " + std::to_string(src));
    }
    std::vector<Window> windows =
        candidate_windows(series, cfg, derive_seed(cfg.rng_seed, src));

    std::vector<ScoredCandidate> scored(windows.size());
    parallel_for(windows.size(), cfg.threads, [&](std::size_t k) {
      const Window w = windows[k];
      Shapelet probe{candidate_values(series, w, cfg.znormalize), src, w.start, 0.0, 0.0,
                     dataset.label(src)};
      const Orderline line = build_orderline(probe, dataset, dist_opts, cfg.exclude_source);
      const SplitQuality q = best_info_gain(line);
      scored[k] = ScoredCandidate{src, w, q.info_gain, q.threshold};
    });
    st.candidates_scored += scored.size();
    st.series_scanned += 1;

    // Per-series survivors, best first, then drop overlapping near-twins.
    std::vector<ScoredCandidate> survivors;
    for (const auto& c : scored) {
      if (c.info_gain >= cfg.ig_threshold) survivors.push_back(c);
    }
    st.threshold_survivors += survivors.size();
    std::sort(survivors.begin(), survivors.end(), better_than);
    std::vector<ScoredCandidate> pruned;
    for (const auto& c : survivors) {
      bool shadowed = false;
      for (const auto& keep : pruned) {
        if (overlaps_majority(c.window, keep.window)) {
          shadowed = true;
          break;
        }
      }
      if (!shadowed) pruned.push_back(c);
    }
    kept.insert(kept.end(), pruned.begin(), pruned.end());

    if (budget_exceeded()) break;  // complete series only; partial series never scored
  }
  st.after_pruning = kept.size();

  std::sort(kept.begin(), kept.end(), better_than);

  std::array<std::size_t, ClassLabel::kCount> class_tally{};
  std::vector<Shapelet> result;
  for (const auto& c : kept) {
    if (result.size() >= max_total) break;
    const ClassLabel label = dataset.label(c.source);
    std::size_t& tally = class_tally[static_cast<std::size_t>(label.id() - 1)];
    if (tally >= per_class) continue;
    ++tally;
    result.push_back(Shapelet{candidate_values(dataset.series(c.source), c.window, cfg.znormalize),
                              c.source, c.window.start, c.info_gain, c.threshold, label});
  }
  st.per_class_retained = class_tally;
  st.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (result.empty()) {
    throw Error(ErrorCode::NoShapeletsFound,
                "no candidate reached the information gain threshold " +
                    std::to_string(cfg.ig_threshold));
  }
  return result;
}

}  // namespace shapelets
