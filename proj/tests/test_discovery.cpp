#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "shapelets/discovery.hpp"
#include "shapelets/preprocess.hpp"

using namespace shapelets;

namespace {

TimeSeries series_of(Eigen::ArrayXd values, double rate = 1.0) {
  return TimeSeries(std::move(values), rate);
}

// Two-class toy set: label 2 series carry one triangular bump on a flat-zero
// background, label 1 series are flat zeros.
LabeledDataset bump_dataset(int per_class = 10, Eigen::Index length = 60) {
  const double bump[9] = {0.8, 1.6, 2.4, 3.2, 4.0, 3.2, 2.4, 1.6, 0.8};
  REQUIRE(length >= 5 + 4 * (per_class - 1) + 9);
  std::vector<TimeSeries> series;
  std::vector<ClassLabel> labels;
  for (int i = 0; i < per_class; ++i) {
    Eigen::ArrayXd x = Eigen::ArrayXd::Zero(length);
    const Eigen::Index start = 5 + 4 * i;
    for (Eigen::Index j = 0; j < 9; ++j) x[start + j] = bump[j];
    series.push_back(series_of(std::move(x)));
    labels.emplace_back(2);
  }
  for (int i = 0; i < per_class; ++i) {
    series.push_back(series_of(Eigen::ArrayXd::Zero(length)));
    labels.emplace_back(1);
  }
  return LabeledDataset(std::move(series), std::move(labels));
}

Eigen::Index bump_start(std::size_t series_index) {
  return 5 + 4 * static_cast<Eigen::Index>(series_index);
}

}  // namespace

TEST_CASE("candidate enumeration counts") {
  DiscoveryConfig cfg;

  SUBCASE("m=5, single length 3 gives starts 0,1,2") {
    cfg.min_len = 3;
    cfg.max_len = 3;
    std::vector<Window> ws;
    generate_candidates(5, cfg, 0, [&](Window w) { ws.push_back(w); });
    REQUIRE(ws.size() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(ws[static_cast<std::size_t>(i)].start == i);
      CHECK(ws[static_cast<std::size_t>(i)].length == 3);
    }
  }

  SUBCASE("m=10 full sweep gives 36 windows") {
    std::size_t count = 0;
    generate_candidates(10, cfg, 0, [&](Window) { ++count; });
    CHECK(count == 36);
  }

  SUBCASE("m=3600 full sweep covers 3598 distinct lengths") {
    std::set<Eigen::Index> lengths;
    generate_candidates(3600, cfg, 0, [&](Window w) { lengths.insert(w.length); });
    CHECK(lengths.size() == 3598);
  }

  SUBCASE("min_len beyond the series is an error") {
    cfg.min_len = 11;
    try {
      generate_candidates(10, cfg, 0, [](Window) {});
      FAIL("expected MinLenExceedsSeries");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MinLenExceedsSeries);
    }
  }

  SUBCASE("seeded sampling is deterministic and a subset of the full sweep") {
    cfg.candidate_sample_fraction = 0.35;
    std::vector<Window> a, b;
    generate_candidates(40, cfg, 99, [&](Window w) { a.push_back(w); });
    generate_candidates(40, cfg, 99, [&](Window w) { b.push_back(w); });
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].start == b[i].start);
      CHECK(a[i].length == b[i].length);
    }
    DiscoveryConfig full;
    std::size_t total = 0;
    generate_candidates(40, full, 0, [&](Window) { ++total; });
    CHECK(a.size() < total);
    CHECK(a.size() > 0);
  }
}

TEST_CASE("subsequence distance: exact self-match is zero") {
  std::mt19937 gen(23);
  Eigen::ArrayXd x = oracle::random_array(gen, 50);
  TimeSeries s = series_of(x);
  Eigen::ArrayXd shapelet = z_normalize(x.segment(17, 8));
  CHECK(subsequence_distance(shapelet, s) == 0.0);
}

TEST_CASE("subsequence distance raw-mode hand example") {
  Eigen::ArrayXd shapelet(3);
  shapelet << 1.0, 2.0, 3.0;
  Eigen::ArrayXd x(5);
  x << 5.0, 1.0, 2.0, 3.0, 9.0;
  DistanceOptions raw;
  raw.znormalize = false;
  CHECK(subsequence_distance(shapelet, series_of(x), raw) == 0.0);
  // alignments enumerate to {18, 0, 38}
  CHECK(oracle::subsequence_distance(shapelet, x, false) == 0.0);
  Eigen::ArrayXd first = x.segment(0, 3);
  CHECK((shapelet - first).square().sum() == 18.0);
  Eigen::ArrayXd last = x.segment(2, 3);
  CHECK((shapelet - last).square().sum() == 38.0);
}

TEST_CASE("subsequence distance equals the brute-force oracle on random pairs") {
  std::mt19937 gen(29);
  std::uniform_int_distribution<Eigen::Index> series_len(10, 60);
  std::uniform_int_distribution<Eigen::Index> shapelet_len(3, 15);
  for (int round = 0; round < 200; ++round) {
    const Eigen::Index m = series_len(gen);
    const Eigen::Index l = std::min(shapelet_len(gen), m);
    Eigen::ArrayXd x = oracle::random_array(gen, m);
    Eigen::ArrayXd s = z_normalize(oracle::random_array(gen, l));
    const double got = subsequence_distance(s, series_of(x));
    const double want = oracle::subsequence_distance(s, x);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("early abandoning never changes a distance") {
  std::mt19937 gen(31);
  for (int round = 0; round < 100; ++round) {
    Eigen::ArrayXd x = oracle::random_array(gen, 45);
    Eigen::ArrayXd s = z_normalize(oracle::random_array(gen, 7));
    DistanceOptions with;
    DistanceOptions without;
    without.early_abandon = false;
    CHECK(subsequence_distance(s, series_of(x), with) ==
          subsequence_distance(s, series_of(x), without));
  }
}

TEST_CASE("shapelet longer than the series is an error") {
  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(10);
  try {
    subsequence_distance(s, series_of(Eigen::ArrayXd::Zero(5)));
    FAIL("expected ShapeletLongerThanSeries");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeletLongerThanSeries);
  }
}

TEST_CASE("orderline excludes the source series by default") {
  // 700 short series so the counting convention is visible directly.
  std::mt19937 gen(37);
  std::vector<TimeSeries> series;
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 700; ++i) {
    series.push_back(series_of(oracle::random_array(gen, 8)));
    labels.emplace_back(1 + i % 7);
  }
  LabeledDataset ds(std::move(series), std::move(labels));
  Shapelet probe{z_normalize(ds.series(0).samples().segment(0, 3)), 0, 0, 0.0, 0.0, ds.label(0)};
  CHECK(build_orderline(probe, ds).size() == 699);
  CHECK(build_orderline(probe, ds, {}, false).size() == 700);
}

TEST_CASE("orderline is sorted with a verbatim match first, and composes from the oracle") {
  std::mt19937 gen(41);
  Eigen::ArrayXd base = oracle::random_array(gen, 30);
  std::vector<TimeSeries> series{series_of(base), series_of(oracle::random_array(gen, 30)),
                                 series_of(oracle::random_array(gen, 30)),
                                 series_of(oracle::random_array(gen, 30))};
  std::vector<ClassLabel> labels{ClassLabel(1), ClassLabel(2), ClassLabel(2), ClassLabel(1)};
  LabeledDataset ds(std::move(series), std::move(labels));
  Shapelet probe{z_normalize(base.segment(4, 6)), 3, 4, 0.0, 0.0, ClassLabel(1)};
  // source index 3 excluded; series 0 contains the subsequence verbatim
  Orderline line = build_orderline(probe, ds);
  REQUIRE(line.size() == 3);
  CHECK(line.front().distance == 0.0);
  CHECK(line.front().label.id() == 1);
  for (std::size_t i = 1; i < line.size(); ++i) {
    CHECK(line[i].distance >= line[i - 1].distance);
  }
  // entries match per-series oracle distances, sorted
  std::vector<double> expected;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == 3) continue;
    expected.push_back(oracle::subsequence_distance(probe.values, ds.series(i).samples()));
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(line[i].distance - expected[i]) <= 1e-9 * std::max(1.0, expected[i]));
  }
}

TEST_CASE("entropy anchors") {
  std::vector<std::size_t> uniform{5, 5};
  CHECK(entropy(uniform) == 1.0);
  std::vector<std::size_t> pure{10};
  CHECK(entropy(pure) == 0.0);
  std::vector<std::size_t> skewed{3, 1};
  CHECK(entropy(skewed) == doctest::Approx(0.8113).epsilon(1e-4));
  std::vector<std::size_t> empty{0, 0};
  CHECK_THROWS_AS(entropy(empty), Error);
  // multi-class upper bound
  std::vector<std::size_t> seven(7, 10);
  CHECK(entropy(seven) == doctest::Approx(std::log2(7.0)));
}

TEST_CASE("best info gain hand example: perfect binary split") {
  Orderline line{{1.0, ClassLabel(1)}, {2.0, ClassLabel(1)}, {3.0, ClassLabel(2)},
                 {4.0, ClassLabel(2)}};
  const SplitQuality q = best_info_gain(line);
  CHECK(q.info_gain == 1.0);
  CHECK(q.threshold == 2.5);
}

TEST_CASE("best info gain degenerate cases") {
  Orderline same_label{{1.0, ClassLabel(3)}, {2.0, ClassLabel(3)}, {5.0, ClassLabel(3)}};
  CHECK(best_info_gain(same_label).info_gain == 0.0);
  Orderline single{{1.0, ClassLabel(3)}};
  CHECK(best_info_gain(single).info_gain == 0.0);
  Orderline tied{{2.0, ClassLabel(1)}, {2.0, ClassLabel(2)}, {2.0, ClassLabel(1)}};
  CHECK(best_info_gain(tied).info_gain == 0.0);  // no distinct distances, no split point
}

TEST_CASE("best info gain matches the exhaustive oracle on random orderlines") {
  std::mt19937 gen(43);
  std::uniform_int_distribution<int> size_dist(5, 40);
  std::uniform_int_distribution<int> class_dist(1, 3);
  std::uniform_real_distribution<double> dist_dist(0.0, 10.0);
  std::uniform_int_distribution<int> dup(0, 3);
  for (int round = 0; round < 300; ++round) {
    Orderline line;
    const int n = size_dist(gen);
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      d = dup(gen) == 0 && !line.empty() ? d : dist_dist(gen);  // inject ties
      line.push_back({d, ClassLabel(class_dist(gen))});
    }
    std::stable_sort(line.begin(), line.end(),
                     [](const auto& a, const auto& b) { return a.distance < b.distance; });
    const SplitQuality got = best_info_gain(line);
    const SplitQuality want = oracle::best_info_gain(line);
    CHECK(std::abs(got.info_gain - want.info_gain) <= 1e-12);
    // the returned threshold actually achieves the reported gain
    CHECK(std::abs(oracle::ig_at_threshold(line, got.threshold) - got.info_gain) <= 1e-12);
  }
}

TEST_CASE("info gain is invariant under strictly monotone distance transforms") {
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> dist_dist(0.0, 5.0);
  std::uniform_int_distribution<int> class_dist(1, 4);
  for (int round = 0; round < 50; ++round) {
    Orderline line;
    for (int i = 0; i < 25; ++i) line.push_back({dist_dist(gen), ClassLabel(class_dist(gen))});
    std::stable_sort(line.begin(), line.end(),
                     [](const auto& a, const auto& b) { return a.distance < b.distance; });
    Orderline squared = line, exponential = line;
    for (auto& e : squared) e.distance = e.distance * e.distance;
    for (auto& e : exponential) e.distance = std::exp(e.distance);
    const double base = best_info_gain(line).info_gain;
    CHECK(std::abs(best_info_gain(squared).info_gain - base) <= 1e-12);
    CHECK(std::abs(best_info_gain(exponential).info_gain - base) <= 1e-12);
  }
}

TEST_CASE("discovery on the bump toy set finds a perfect shapelet") {
  LabeledDataset ds = bump_dataset();
  DiscoveryConfig cfg;
  cfg.exclude_source = false;  // balanced 10/10 orderlines make IG exactly 1 attainable
  DiscoveryStats stats;
  std::vector<Shapelet> found = discover_shapelets(ds, cfg, &stats);
  REQUIRE(!found.empty());

  const Shapelet& top = found.front();
  CHECK(top.info_gain == 1.0);
  // the top window intersects the injected bump
  CHECK(top.class_hint.id() == 2);
  const Eigen::Index bump_lo = bump_start(top.source_series_index);
  CHECK(top.start_offset < bump_lo + 9);
  CHECK(top.start_offset + top.length() > bump_lo);

  // caps and threshold hold for the whole set
  const std::size_t r = 10 * ds.size();
  CHECK(found.size() <= r);
  std::map<int, std::size_t> per_class;
  for (const Shapelet& s : found) {
    CHECK(s.info_gain >= cfg.ig_threshold);
    per_class[s.class_hint.id()]++;
  }
  for (const auto& [id, count] : per_class) {
    CHECK(count <= r / 2);  // numC = 2
  }
  CHECK(stats.candidates_scored > 0);
  CHECK(stats.threshold_survivors >= found.size());
}

TEST_CASE("an unreachable threshold reports NoShapeletsFound") {
  LabeledDataset ds = bump_dataset(3, 30);
  DiscoveryConfig cfg;
  cfg.ig_threshold = 1.1;
  try {
    discover_shapelets(ds, cfg);
    FAIL("expected NoShapeletsFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoShapeletsFound);
  }
}

TEST_CASE("discovery is deterministic and thread-count independent") {
  LabeledDataset ds = bump_dataset(4, 30);
  DiscoveryConfig cfg;
  cfg.len_stride = 2;
  cfg.pos_stride = 2;
  cfg.candidate_sample_fraction = 0.7;
  cfg.rng_seed = 1234;

  auto run = [&](int threads) {
    DiscoveryConfig c = cfg;
    c.threads = threads;
    return discover_shapelets(ds, c);
  };
  const auto a = run(1);
  const auto b = run(1);
  const auto c = run(3);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].source_series_index == b[i].source_series_index);
    CHECK(a[i].start_offset == b[i].start_offset);
    CHECK(a[i].info_gain == b[i].info_gain);
    CHECK(a[i].source_series_index == c[i].source_series_index);
    CHECK(a[i].start_offset == c[i].start_offset);
    CHECK(a[i].info_gain == c[i].info_gain);
    CHECK((a[i].values == c[i].values).all());
  }
}

TEST_CASE("discovered shapelets are invariant to per-series scale and offset") {
  LabeledDataset ds = bump_dataset(4, 30);
  std::mt19937 gen(53);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  std::vector<TimeSeries> rescaled;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    rescaled.push_back(series_of(scale(gen) * ds.series(i).samples() + offset(gen)));
  }
  LabeledDataset transformed(std::move(rescaled), ds.labels());

  DiscoveryConfig cfg;
  cfg.min_len = 3;
  cfg.max_len = 12;
  const auto base = discover_shapelets(ds, cfg);
  const auto moved = discover_shapelets(transformed, cfg);
  REQUIRE(base.size() == moved.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].source_series_index == moved[i].source_series_index);
    CHECK(base[i].start_offset == moved[i].start_offset);
    CHECK(base[i].length() == moved[i].length());
    CHECK(std::abs(base[i].info_gain - moved[i].info_gain) <= 1e-12);
    CHECK(((base[i].values - moved[i].values).abs() < 1e-9).all());
  }
}

TEST_CASE("unit-stride full search is at least as good as any strided run") {
  // A noisier two-class set where gains are below 1, so the comparison bites.
  std::mt19937 gen(59);
  std::vector<TimeSeries> series;
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 6; ++i) {
    Eigen::ArrayXd x = oracle::random_array(gen, 40, -0.3, 0.3);
    if (i < 3) {
      for (Eigen::Index j = 0; j < 6; ++j) x[10 + j] += 1.5;
    }
    series.push_back(series_of(std::move(x)));
    labels.emplace_back(i < 3 ? 2 : 1);
  }
  LabeledDataset ds(std::move(series), std::move(labels));

  DiscoveryConfig full;
  full.ig_threshold = 0.0;
  DiscoveryConfig strided = full;
  strided.len_stride = 3;
  strided.pos_stride = 2;
  strided.candidate_sample_fraction = 0.5;
  strided.rng_seed = 7;

  const double best_full = discover_shapelets(ds, full).front().info_gain;
  const double best_strided = discover_shapelets(ds, strided).front().info_gain;
  CHECK(best_full >= best_strided);
}
