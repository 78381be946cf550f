#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "shapelets/types.hpp"

namespace shapelets {

struct ForestConfig {
  int n_trees = 500;
  int max_features_per_split = 0;  // 0 = floor(sqrt(feature count))
  int min_samples_leaf = 1;
  int max_depth = -1;              // -1 = unlimited
  std::uint64_t rng_seed = 0;
  int threads = 1;
};

/// One node of a binary decision tree. Internal nodes route on
/// feature < threshold (left) vs >= (right); leaves hold a class
/// probability vector over the model's class order.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::VectorXd probabilities;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at index 0

  const Eigen::VectorXd& leaf_probabilities(
      const Eigen::Ref<const Eigen::VectorXd>& features) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<ClassLabel> classes;  // ordered by id
  ForestConfig config;

  std::size_t feature_count = 0;
};

/// Grows n_trees CART trees, each on a bootstrap sample of the rows, with
/// max_features_per_split features drawn per node and the best Gini split
/// taken. Thresholds are midpoints between consecutive distinct sorted
/// feature values. Per-tree seeds derive from the master seed, so any
/// thread count yields the same model.
ForestModel train_forest(const TransformMatrix& matrix, const ForestConfig& cfg);

struct Prediction {
  ClassLabel label;
  Eigen::VectorXd probabilities;  // mean over trees; sums to 1
};

/// Mean of the per-tree leaf probability vectors; label is the argmax with
/// ties broken toward the lowest class id.
Prediction predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& features);

std::vector<ClassLabel> predict_labels(const ForestModel& model, const Eigen::MatrixXd& features);

/// The bootstrap row sample (with replacement) drawn by the tree seeded
/// with `seed`. Exposed so a training run can be audited row by row.
std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t n_rows);

}  // namespace shapelets
