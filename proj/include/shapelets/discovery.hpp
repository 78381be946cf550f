#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shapelets/types.hpp"

namespace shapelets {

/// Distance semantics shared by discovery and the transform. Train-time and
/// test-time features must be computed with the same options.
struct DistanceOptions {
  bool znormalize = true;        // z-normalize candidate and every window
  bool length_normalize = false; // divide by subsequence length
  bool early_abandon = true;     // abandon a window once it exceeds the best
};

struct DiscoveryConfig {
  Eigen::Index min_len = 3;
  Eigen::Index max_len = 0;        // 0 = full series length
  double ig_threshold = 0.05;
  std::size_t max_shapelets = 0;   // r; 0 = 10 * dataset size
  std::size_t per_class_cap = 0;   // 0 = r / numC
  Eigen::Index len_stride = 1;
  Eigen::Index pos_stride = 1;
  double candidate_sample_fraction = 1.0;
  std::uint64_t rng_seed = 0;
  bool exclude_source = true;      // orderline skips the candidate's own series
  bool znormalize = true;
  bool length_normalize = false;
  double time_budget_seconds = 0;  // 0 = no budget; checked between series
  int threads = 1;

  DistanceOptions distance_options() const {
    return DistanceOptions{znormalize, length_normalize, true};
  }
};

struct Window {
  Eigen::Index start = 0;
  Eigen::Index length = 0;
};

/// Enumerates candidate windows of a series of length m: lengths
/// min_len, min_len + len_stride, ... up to max_len, starts strided by
/// pos_stride; (m - l) + 1 windows per length at unit strides. With
/// candidate_sample_fraction < 1 a seeded subset is kept. Enumeration order
/// is fixed: by length, then by start.
void generate_candidates(Eigen::Index series_length, const DiscoveryConfig& cfg,
                         std::uint64_t sampling_seed,
                         const std::function<void(Window)>& sink);

std::vector<Window> candidate_windows(const TimeSeries& series, const DiscoveryConfig& cfg,
                                      std::uint64_t sampling_seed);

/// Minimum over all alignments of the squared Euclidean distance between the
/// candidate values and a same-length window of the series. With
/// opts.znormalize the candidate is assumed already z-normalized and each
/// window is z-normalized before comparison.
double subsequence_distance(const Eigen::Ref<const Eigen::ArrayXd>& shapelet_values,
                            const TimeSeries& series,
                            const DistanceOptions& opts = {});

struct OrderlineEntry {
  double distance;
  ClassLabel label;
};

/// Distances from one candidate to every series, sorted ascending; ties keep
/// dataset order. One entry per series, minus the source series when
/// exclude_source is set.
using Orderline = std::vector<OrderlineEntry>;

Orderline build_orderline(const Shapelet& shapelet, const LabeledDataset& dataset,
                          const DistanceOptions& opts = {}, bool exclude_source = true);

/// Shannon entropy in bits: -sum p_c log2 p_c, with 0 log 0 = 0.
/// Throws EmptyPartition when the total count is zero.
double entropy(std::span<const std::size_t> class_counts);

struct SplitQuality {
  double info_gain = 0.0;
  double threshold = 0.0;
};

/// Scans every split point (midpoints between consecutive distinct
/// distances) and returns the maximum information gain with an achieving
/// threshold. Orderlines with fewer than two entries or a single label have
/// gain 0 by definition.
SplitQuality best_info_gain(const Orderline& orderline);

struct DiscoveryStats {
  std::size_t candidates_scored = 0;
  std::size_t threshold_survivors = 0;  // cleared ig_threshold, before pruning and caps
  std::size_t after_pruning = 0;
  std::array<std::size_t, ClassLabel::kCount> per_class_retained{};
  std::size_t series_scanned = 0;  // < dataset size when a time budget cut the pass short
  double elapsed_seconds = 0.0;
};

/// Full search: enumerate candidates per series, score each by information
/// gain over its orderline, drop candidates below cfg.ig_threshold, prune
/// same-series candidates whose windows overlap by more than 50% (keeping
/// the higher gain), then apply the per-class cap and the global cap r.
/// Ordering and ties are fully deterministic: gain desc, length asc, source
/// index asc, start asc. Throws NoShapeletsFound when nothing clears the
/// threshold.
std::vector<Shapelet> discover_shapelets(const LabeledDataset& dataset,
                                         const DiscoveryConfig& cfg,
                                         DiscoveryStats* stats = nullptr);

}  // namespace shapelets
