#include "shapelets/metrics.hpp"

#include <map>

namespace shapelets {

ConfusionMatrix confusion_matrix(const std::vector<ClassLabel>& actual,
                                 const std::vector<ClassLabel>& predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "actual and predicted label counts differ: " + std::to_string(actual.size()) +
                    " vs " + std::to_string(predicted.size()));
  }
  if (actual.empty()) {
    throw Error(ErrorCode::LengthMismatch, "cannot evaluate zero instances");
  }
  std::map<int, int> index;
  for (const auto& label : actual) index.emplace(label.id(), 0);
  for (const auto& label : predicted) index.emplace(label.id(), 0);
  ConfusionMatrix cm;
  int next = 0;
  for (auto& [id, idx] : index) {
    idx = next++;
    cm.classes.emplace_back(id);
  }
  cm.counts = Eigen::MatrixX<long>::Zero(next, next);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    cm.counts(index.at(actual[i].id()), index.at(predicted[i].id())) += 1;
  }
  return cm;
}

Report classification_report(const ConfusionMatrix& cm) {
  const Eigen::Index k = cm.counts.rows();
  const double total = static_cast<double>(cm.total());
  if (!(total >= 1.0)) {
    throw Error(ErrorCode::EmptyPartition, "confusion matrix has no instances");
  }
  Report report;
  report.accuracy = static_cast<double>(cm.counts.diagonal().sum()) / total;
  for (Eigen::Index c = 0; c < k; ++c) {
    const double tp = static_cast<double>(cm.counts(c, c));
    const double fp = static_cast<double>(cm.counts.col(c).sum()) - tp;
    const double fn = static_cast<double>(cm.counts.row(c).sum()) - tp;
    const double tn = total - tp - fp - fn;
    ClassMetrics m{cm.classes[static_cast<std::size_t>(c)]};
    m.support = static_cast<std::size_t>(cm.counts.row(c).sum());
    if (tp + fp > 0) {
      m.precision = tp / (tp + fp);
    } else {
      m.precision_undefined = true;
    }
    if (tp + fn > 0) {
      m.recall = tp / (tp + fn);
    } else {
      m.recall_undefined = true;
    }
    if (m.precision + m.recall > 0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
      m.f1_undefined = true;
    }
    m.one_vs_rest_accuracy = (tp + tn) / total;
    report.per_class.push_back(std::move(m));
  }
  return report;
}

}  // namespace shapelets
