#include <doctest.h>

#include <map>

#include "shapelets/io.hpp"
#include "shapelets/preprocess.hpp"
#include "shapelets/synthgen.hpp"

using namespace shapelets;

namespace {

GeneratorSpec small_spec(std::uint64_t seed = 0) {
  GeneratorSpec spec = balanced_spec(2, 600, seed);
  return spec;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool features_in_bounds(const ShapeFeatures& f, const FeatureBounds& b) {
  if (!within(f.zeros_fraction, b.zeros_lo, b.zeros_hi)) return false;
  if (b.ratio_hi > 0.0 && !within(f.peak_to_median, b.ratio_lo, b.ratio_hi)) return false;
  if (!within(f.slope_fraction, b.slope_lo, b.slope_hi)) return false;
  if (f.step_count < b.steps_lo || f.step_count > b.steps_hi) return false;
  return true;
}

}  // namespace

TEST_CASE("every class's features sit inside its documented bounds") {
  GeneratorSpec spec = small_spec();
  spec.series_length = 3600;
  for (int id = 1; id <= 7; ++id) {
    const ClassLabel label(id);
    const FeatureBounds bounds = recipe_bounds(label);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const TimeSeries s = generate_pattern(label, spec.series_length, seed, spec);
      const ShapeFeatures f = shape_features(s);
      INFO("class ", label.name(), " seed ", seed, ": zeros=", f.zeros_fraction,
           " ratio=", f.peak_to_median, " slope=", f.slope_fraction, " steps=", f.step_count);
      CHECK(features_in_bounds(f, bounds));
    }
  }
}

TEST_CASE("every class pair is separated by at least one feature with disjoint bounds") {
  for (int a = 1; a <= 7; ++a) {
    for (int b = a + 1; b <= 7; ++b) {
      const FeatureBounds fa = recipe_bounds(ClassLabel(a));
      const FeatureBounds fb = recipe_bounds(ClassLabel(b));
      const bool zeros_disjoint = fa.zeros_hi < fb.zeros_lo || fb.zeros_hi < fa.zeros_lo;
      const bool ratio_disjoint = fa.ratio_hi > 0.0 && fb.ratio_hi > 0.0 &&
                                  (fa.ratio_hi < fb.ratio_lo || fb.ratio_hi < fa.ratio_lo);
      const bool slope_disjoint = fa.slope_hi < fb.slope_lo || fb.slope_hi < fa.slope_lo;
      const bool steps_disjoint = fa.steps_hi < fb.steps_lo || fb.steps_hi < fa.steps_lo;
      INFO("classes ", a, " vs ", b);
      CHECK((zeros_disjoint || ratio_disjoint || slope_disjoint || steps_disjoint));
    }
  }
}

TEST_CASE("missing series are at least 90% exact zeros") {
  GeneratorSpec spec = small_spec();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TimeSeries s = generate_pattern(ClassLabel(2), 600, seed, spec);
    const double zeros =
        static_cast<double>((s.samples() == 0.0).count()) / static_cast<double>(s.length());
    CHECK(zeros >= 0.90);
  }
}

TEST_CASE("minor stays below a tenth of the normal band") {
  GeneratorSpec spec = small_spec();
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TimeSeries normal = generate_pattern(ClassLabel(1), 600, seed, spec);
    const TimeSeries minor = generate_pattern(ClassLabel(3), 600, seed, spec);
    std::vector<double> n(normal.samples().data(), normal.samples().data() + normal.length());
    std::vector<double> m(minor.samples().data(), minor.samples().data() + minor.length());
    std::nth_element(n.begin(), n.begin() + n.size() / 2, n.end());
    std::nth_element(m.begin(), m.begin() + m.size() / 2, m.end());
    CHECK(m[m.size() / 2] < 0.10 * n[n.size() / 2]);
  }
}

TEST_CASE("outlier spikes count between 1 and 5, and the Hampel filter removes them all") {
  GeneratorSpec spec = small_spec();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TimeSeries s = generate_pattern(ClassLabel(4), 600, seed, spec);
    std::vector<double> v(s.samples().data(), s.samples().data() + s.length());
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    const double median = v[v.size() / 2];
    const auto spike_count = [&](const TimeSeries& t) {
      return (t.samples() > 5.0 * median).count();
    };
    const auto before = spike_count(s);
    CHECK(before >= 1);
    CHECK(before <= 5);
    // spikes are >= 10x the band
    CHECK((s.samples().maxCoeff() >= 10.0 * median));
    const TimeSeries filtered = remove_outliers(s, 11, 3.0);
    CHECK(spike_count(filtered) == 0);
  }
}

TEST_CASE("hampel filtering leaves normal series almost untouched") {
  GeneratorSpec spec = small_spec();
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TimeSeries s = generate_pattern(ClassLabel(1), 3600, seed, spec);
    const TimeSeries filtered = remove_outliers(s, 11, 3.0);
    const auto changed = (filtered.samples() != s.samples()).count();
    CHECK(static_cast<double>(changed) <= 0.01 * static_cast<double>(s.length()));
  }
}

TEST_CASE("detrended trend series land in the drift recipe's acceptance region") {
  GeneratorSpec spec = small_spec();
  spec.series_length = 3600;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TimeSeries trend = generate_pattern(ClassLabel(6), 3600, seed, spec);
    CHECK_FALSE(matches_drift_recipe(trend));
    const TimeSeries flattened = detrend(trend);
    const LineFit fit = fit_line(flattened.samples());
    CHECK(std::abs(fit.slope) < 1e-9);
    CHECK(matches_drift_recipe(flattened));

    const TimeSeries drift = generate_pattern(ClassLabel(7), 3600, seed, spec);
    CHECK(matches_drift_recipe(drift));
    const TimeSeries normal = generate_pattern(ClassLabel(1), 3600, seed, spec);
    CHECK_FALSE(matches_drift_recipe(normal));
  }
}

TEST_CASE("generation is deterministic") {
  GeneratorSpec spec = small_spec(42);
  LabeledDataset a = generate_dataset(spec);
  LabeledDataset b = generate_dataset(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.label(i) == b.label(i));
    CHECK((a.series(i).samples() == b.series(i).samples()).all());
  }
  CHECK(dataset_to_csv(a) == dataset_to_csv(b));
}

TEST_CASE("balanced preset emits the expected counts") {
  LabeledDataset ds = generate_dataset(balanced_spec(100, 60, 1));
  CHECK(ds.size() == 700);
  std::map<int, int> counts;
  for (const auto& label : ds.labels()) counts[label.id()]++;
  for (int id = 1; id <= 7; ++id) CHECK(counts[id] == 100);
}

TEST_CASE("realistic mix approximates the field proportions") {
  const auto counts = realistic_counts(1000);
  CHECK(counts.at(1) == 480);
  CHECK(counts.at(2) == 100);
  CHECK(counts.at(5) == 100);
  CHECK(counts.at(6) == 200);
  CHECK(counts.at(7) == 24);
  CHECK(counts.at(4) == 19);
  CHECK(counts.at(3) == 77);
  std::size_t total = 0;
  for (const auto& [id, c] : counts) total += c;
  CHECK(total == 1000);
}

TEST_CASE("invalid generator specs are rejected") {
  GeneratorSpec empty;
  CHECK_THROWS_AS(generate_dataset(empty), Error);
  GeneratorSpec zero = balanced_spec(0, 100, 0);
  CHECK_THROWS_AS(generate_dataset(zero), Error);
}

TEST_CASE("raw vibration mode reproduces the envelope pattern through preprocessing") {
  GeneratorSpec spec = small_spec();
  for (int id : {1, 2, 4}) {
    const ClassLabel label(id);
    const TimeSeries raw = generate_raw_vibration(label, 300, 5, spec);
    CHECK(raw.length() == 6000);
    CHECK(raw.sample_rate_hz() == doctest::Approx(20.0));
    const TimeSeries envelope = downsample(peak_envelope(raw, 20), 20);
    CHECK(envelope.length() == 300);
    CHECK(envelope.sample_rate_hz() == doctest::Approx(1.0));
    const TimeSeries reference = generate_pattern(label, 300, 5, spec);
    // block maxima may borrow a neighboring second's peak, so compare loosely
    for (Eigen::Index k = 1; k + 1 < 300; ++k) {
      const double hi = std::max({reference.samples()[k - 1], reference.samples()[k],
                                  reference.samples()[k + 1]});
      CHECK(envelope.samples()[k] <= hi + 1e-9);
      CHECK(envelope.samples()[k] >= reference.samples()[k] - 1e-9);
    }
  }
}
