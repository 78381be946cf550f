#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "shapelets/types.hpp"

namespace shapelets {

/// counts(a, p) = number of instances of actual class `a` predicted as `p`.
/// Class order is fixed by ascending label id over the labels present.
struct ConfusionMatrix {
  Eigen::MatrixX<long> counts;
  std::vector<ClassLabel> classes;

  long total() const { return counts.sum(); }
};

ConfusionMatrix confusion_matrix(const std::vector<ClassLabel>& actual,
                                 const std::vector<ClassLabel>& predicted);

struct ClassMetrics {
  ClassLabel label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // 0/0 ratios are reported as 0 with the flag set instead of NaN.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  std::size_t support = 0;               // row total (actual instances)
  double one_vs_rest_accuracy = 0.0;     // (TP + TN) / total for this class
};

struct Report {
  double accuracy = 0.0;  // trace / total
  std::vector<ClassMetrics> per_class;
};

/// One-vs-rest precision, recall and F1 per class plus overall accuracy
/// (diagonal sum over total).
Report classification_report(const ConfusionMatrix& cm);

}  // namespace shapelets
