#include "shapelets/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace shapelets {

namespace {
constexpr std::array<std::string_view, ClassLabel::kCount> kClassNames = {
    "normal", "missing", "minor", "outlier", "square", "trend", "drift"};
}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgs: return "InvalidArgs";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MixedSampleRate: return "MixedSampleRate";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::MinLenExceedsSeries: return "MinLenExceedsSeries";
    case ErrorCode::ShapeletLongerThanSeries: return "ShapeletLongerThanSeries";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::NoShapeletsFound: return "NoShapeletsFound";
    case ErrorCode::EmptyShapeletSet: return "EmptyShapeletSet";
    case ErrorCode::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::FeatureLengthMismatch: return "FeatureLengthMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "UnknownError";
}

ClassLabel::ClassLabel(int id) : id_(id) {
  if (id < 1 || id > kCount) {
    throw Error(ErrorCode::InvalidArgs,
                "class label id must be in 1..7, got " + std::to_string(id));
  }
}

ClassLabel ClassLabel::from_name(std::string_view name) {
  for (int i = 0; i < kCount; ++i) {
    if (kClassNames[static_cast<std::size_t>(i)] == name) return ClassLabel(i + 1);
  }
  throw Error(ErrorCode::InvalidArgs, "unknown class name: " + std::string(name));
}

std::string_view ClassLabel::name() const noexcept {
  return kClassNames[static_cast<std::size_t>(id_ - 1)];
}

TimeSeries::TimeSeries(Eigen::ArrayXd samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (samples_.size() < 1) {
    throw Error(ErrorCode::SeriesTooShort, "series has no samples");
  }
  if (!(sample_rate_hz_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgs, "sample rate must be positive");
  }
  if (!samples_.isFinite().all()) {
    throw Error(ErrorCode::NonFiniteSample, "series contains NaN or infinite samples");
  }
}

LabeledDataset::LabeledDataset(std::vector<TimeSeries> series, std::vector<ClassLabel> labels)
    : series_(std::move(series)), labels_(std::move(labels)) {
  if (series_.empty()) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no series");
  }
  if (series_.size() != labels_.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "series and label counts differ: " + std::to_string(series_.size()) + " vs " +
                    std::to_string(labels_.size()));
  }
  const double rate = series_.front().sample_rate_hz();
  for (std::size_t i = 0; i < series_.size(); ++i) {
    if (series_[i].length() < 3) {
      throw Error(ErrorCode::SeriesTooShort, "series " + std::to_string(i) +
                                                 " is shorter than the minimum meaningful "
                                                 "length of 3");
    }
    if (series_[i].sample_rate_hz() != rate) {
      throw Error(ErrorCode::MixedSampleRate, "all series must share one sample rate");
    }
  }
}

int LabeledDataset::class_count() const {
  std::set<int> ids;
  for (const auto& label : labels_) ids.insert(label.id());
  return static_cast<int>(ids.size());
}

std::vector<ClassLabel> LabeledDataset::distinct_labels() const {
  std::set<int> ids;
  for (const auto& label : labels_) ids.insert(label.id());
  std::vector<ClassLabel> out;
  out.reserve(ids.size());
  for (int id : ids) out.emplace_back(id);
  return out;
}

const LabeledDataset& validate_dataset(const LabeledDataset& dataset) {
  // Type constructors enforce the invariants; re-check them anyway so data
  // mutated through aliasing or deserialized by other code cannot slip by.
  if (dataset.size() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no series");
  const double rate = dataset.sample_rate_hz();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const TimeSeries& s = dataset.series(i);
    if (s.length() < 3) {
      throw Error(ErrorCode::SeriesTooShort, "series " + std::to_string(i) + " is shorter than 3");
    }
    if (s.sample_rate_hz() != rate) {
      throw Error(ErrorCode::MixedSampleRate, "series " + std::to_string(i) + " has a different rate");
    }
    if (!s.samples().isFinite().all()) {
      throw Error(ErrorCode::NonFiniteSample, "series " + std::to_string(i) + " has non-finite samples");
    }
  }
  return dataset;
}

std::string shapelet_id(const Shapelet& s) {
  std::ostringstream out;
  out << 'c' << s.class_hint.id() << "_s" << s.source_series_index << "_o" << s.start_offset
      << "_l" << s.length();
  return out.str();
}

}  // namespace shapelets
