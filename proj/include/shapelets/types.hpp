#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapelets {

enum class ErrorCode {
  InvalidArgs,
  ParseError,
  IoError,
  MixedSampleRate,
  EmptyDataset,
  SeriesTooShort,
  NonFiniteSample,
  WindowTooLarge,
  MinLenExceedsSeries,
  ShapeletLongerThanSeries,
  EmptyPartition,
  NoShapeletsFound,
  EmptyShapeletSet,
  SingleClassTrainingSet,
  EmptyMatrix,
  FeatureLengthMismatch,
  LengthMismatch,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

/// The seven data-pattern classes. The id <-> name mapping is fixed:
/// 1=normal, 2=missing, 3=minor, 4=outlier, 5=square, 6=trend, 7=drift.
class ClassLabel {
 public:
  static constexpr int kCount = 7;

  explicit ClassLabel(int id);
  static ClassLabel from_name(std::string_view name);

  int id() const noexcept { return id_; }
  std::string_view name() const noexcept;

  friend bool operator==(ClassLabel a, ClassLabel b) noexcept { return a.id_ == b.id_; }
  friend bool operator!=(ClassLabel a, ClassLabel b) noexcept { return a.id_ != b.id_; }
  friend bool operator<(ClassLabel a, ClassLabel b) noexcept { return a.id_ < b.id_; }

 private:
  int id_;
};

/// One univariate record: finite samples at a fixed rate. Missing data is
/// represented as literal zeros (a dead channel reads zero), never NaN.
/// Datasets additionally require length >= 3, the shortest meaningful
/// subsequence length; a bare series may be shorter mid-preprocessing.
class TimeSeries {
 public:
  TimeSeries(Eigen::ArrayXd samples, double sample_rate_hz);

  const Eigen::ArrayXd& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  Eigen::Index length() const noexcept { return samples_.size(); }

 private:
  Eigen::ArrayXd samples_;
  double sample_rate_hz_;
};

/// The learning set: (series, label) pairs sharing one sample rate.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<TimeSeries> series, std::vector<ClassLabel> labels);

  std::size_t size() const noexcept { return series_.size(); }
  const TimeSeries& series(std::size_t i) const { return series_.at(i); }
  ClassLabel label(std::size_t i) const { return labels_.at(i); }
  const std::vector<TimeSeries>& all_series() const noexcept { return series_; }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }
  double sample_rate_hz() const noexcept { return series_.front().sample_rate_hz(); }

  /// Number of distinct labels present (numC).
  int class_count() const;
  /// Distinct labels present, ordered by id.
  std::vector<ClassLabel> distinct_labels() const;

 private:
  std::vector<TimeSeries> series_;
  std::vector<ClassLabel> labels_;
};

/// Re-checks every dataset invariant and returns the input unchanged.
/// Construction already enforces them; this is the hook for data that
/// arrives through deserialization.
const LabeledDataset& validate_dataset(const LabeledDataset& dataset);

/// A discovered subsequence plus provenance and quality. `values` are
/// z-normalized (mean 0, population std 1) unless the raw subsequence was
/// constant, in which case they are exactly zero, or discovery ran with
/// normalization disabled.
struct Shapelet {
  Eigen::ArrayXd values;
  std::size_t source_series_index = 0;
  Eigen::Index start_offset = 0;
  double info_gain = 0.0;
  double split_threshold = 0.0;
  ClassLabel class_hint;

  Eigen::Index length() const noexcept { return values.size(); }
};

/// Stable identifier used as the transform column header:
/// c<class>_s<series>_o<offset>_l<length>.
std::string shapelet_id(const Shapelet& s);

/// Matrix G: one row per series, one column per shapelet, each entry the
/// minimum shapelet-to-series distance, with labels kept per row.
struct TransformMatrix {
  Eigen::MatrixXd values;
  std::vector<ClassLabel> labels;
  std::vector<std::string> feature_ids;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

}  // namespace shapelets
