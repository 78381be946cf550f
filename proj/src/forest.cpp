#include "shapelets/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "shapelets/parallel.hpp"
#include "shapelets/rng.hpp"

namespace shapelets {

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& features;      // n x r
  const std::vector<int>& row_classes;  // class index per row, 0-based
  int n_classes;
  int max_features;
  int min_samples_leaf;
  int max_depth;  // -1 = unlimited
  Rng rng;
  std::vector<TreeNode> nodes;

  // split scratch
  std::vector<int> feature_pool;

  Eigen::VectorXd leaf_distribution(const std::vector<std::size_t>& rows) const {
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(n_classes);
    for (std::size_t r : rows) probs[row_classes[r]] += 1.0;
    probs /= static_cast<double>(rows.size());
    return probs;
  }

  static double gini(const std::vector<double>& counts, double total) {
    double g = 1.0;
    for (double c : counts) {
      const double p = c / total;
      g -= p * p;
    }
    return g;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child Gini
  };

  // Best Gini split over a random feature subset; ties keep the first
  // candidate in draw order, then the lower threshold.
  Split find_split(const std::vector<std::size_t>& rows) {
    const int r = static_cast<int>(features.cols());
    feature_pool.resize(static_cast<std::size_t>(r));
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    const int draws = std::min(max_features, r);
    // Partial Fisher-Yates: the first `draws` entries are the sample.
    for (int i = 0; i < draws; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) +
                            rng.bounded(static_cast<std::uint64_t>(r - i));
      std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[j]);
    }

    const double total = static_cast<double>(rows.size());
    Split best;
    bool found = false;

    std::vector<std::pair<double, int>> ordered(rows.size());  // (value, class)
    std::vector<double> left_counts(static_cast<std::size_t>(n_classes));
    std::vector<double> right_counts(static_cast<std::size_t>(n_classes));

    for (int fi = 0; fi < draws; ++fi) {
      const int f = feature_pool[static_cast<std::size_t>(fi)];
      for (std::size_t k = 0; k < rows.size(); ++k) {
        ordered[k] = {features(static_cast<Eigen::Index>(rows[k]), f), row_classes[rows[k]]};
      }
      std::sort(ordered.begin(), ordered.end());

      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      std::fill(right_counts.begin(), right_counts.end(), 0.0);
      for (const auto& [value, cls] : ordered) right_counts[static_cast<std::size_t>(cls)] += 1.0;

      for (std::size_t k = 1; k < ordered.size(); ++k) {
        const int cls = ordered[k - 1].second;
        left_counts[static_cast<std::size_t>(cls)] += 1.0;
        right_counts[static_cast<std::size_t>(cls)] -= 1.0;
        if (!(ordered[k].first > ordered[k - 1].first)) continue;  // no gap, no threshold
        const double n_left = static_cast<double>(k);
        const double n_right = total - n_left;
        if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
        const double impurity =
            (n_left * gini(left_counts, n_left) + n_right * gini(right_counts, n_right)) / total;
        if (!found || impurity < best.impurity) {
          best.feature = f;
          best.threshold = 0.5 * (ordered[k - 1].first + ordered[k].first);
          best.impurity = impurity;
          found = true;
        }
      }
    }
    return best;
  }

  bool is_pure(const std::vector<std::size_t>& rows) const {
    const int first = row_classes[rows.front()];
    for (std::size_t r : rows) {
      if (row_classes[r] != first) return false;
    }
    return true;
  }

  int grow(std::vector<std::size_t>&& rows, int depth) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const bool depth_capped = max_depth >= 0 && depth >= max_depth;
    if (rows.size() < 2 * static_cast<std::size_t>(min_samples_leaf) || depth_capped ||
        is_pure(rows)) {
      nodes[static_cast<std::size_t>(index)].probabilities = leaf_distribution(rows);
      return index;
    }
    const Split split = find_split(rows);
    if (split.feature < 0) {  // all drawn features constant on these rows
      nodes[static_cast<std::size_t>(index)].probabilities = leaf_distribution(rows);
      return index;
    }
    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t r : rows) {
      if (features(static_cast<Eigen::Index>(r), split.feature) < split.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes[static_cast<std::size_t>(index)].feature = split.feature;
    nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
    const int left = grow(std::move(left_rows), depth + 1);
    nodes[static_cast<std::size_t>(index)].left = left;
    const int right = grow(std::move(right_rows), depth + 1);
    nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }
};

}  // namespace

std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t n_rows) {
  Rng rng(seed);
  std::vector<std::size_t> rows(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    rows[i] = static_cast<std::size_t>(rng.bounded(n_rows));
  }
  return rows;
}

ForestModel train_forest(const TransformMatrix& matrix, const ForestConfig& cfg) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index r = matrix.cols();
  if (n == 0 || r == 0) {
    throw Error(ErrorCode::EmptyMatrix, "transform matrix has no rows or no columns");
  }
  if (n < 2) {
    throw Error(ErrorCode::EmptyMatrix, "training needs at least 2 rows");
  }
  if (cfg.n_trees < 1) {
    throw Error(ErrorCode::InvalidArgs, "n_trees must be >= 1");
  }

  // Class order fixed by id.
  std::map<int, int> class_index;
  for (const ClassLabel& label : matrix.labels) class_index.emplace(label.id(), 0);
  if (class_index.size() < 2) {
    throw Error(ErrorCode::SingleClassTrainingSet, "training set has a single class");
  }
  std::vector<ClassLabel> classes;
  int next = 0;
  for (auto& [id, idx] : class_index) {
    idx = next++;
    classes.emplace_back(id);
  }
  std::vector<int> row_classes(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    row_classes[static_cast<std::size_t>(i)] = class_index.at(matrix.labels[static_cast<std::size_t>(i)].id());
  }

  int max_features = cfg.max_features_per_split;
  if (max_features <= 0) {
    max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(r)))));
  }
  max_features = std::min(max_features, static_cast<int>(r));

  ForestModel model;
  model.classes = classes;
  model.config = cfg;
  model.config.max_features_per_split = max_features;
  model.feature_count = static_cast<std::size_t>(r);
  model.trees.resize(static_cast<std::size_t>(cfg.n_trees));

  parallel_for(static_cast<std::size_t>(cfg.n_trees), cfg.threads, [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(cfg.rng_seed, t);
    TreeBuilder builder{matrix.values,
                        row_classes,
                        static_cast<int>(classes.size()),
                        max_features,
                        std::max(1, cfg.min_samples_leaf),
                        cfg.max_depth,
                        Rng(derive_seed(seed, 1)),
                        {},
                        {}};
    std::vector<std::size_t> rows = bootstrap_indices(seed, static_cast<std::size_t>(n));
    builder.grow(std::move(rows), 0);
    model.trees[t].nodes = std::move(builder.nodes);
  });
  return model;
}

const Eigen::VectorXd& DecisionTree::leaf_probabilities(
    const Eigen::Ref<const Eigen::VectorXd>& features) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = features[node->feature] < node->threshold ? &nodes[static_cast<std::size_t>(node->left)]
                                                     : &nodes[static_cast<std::size_t>(node->right)];
  }
  return node->probabilities;
}

Prediction predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& features) {
  if (static_cast<std::size_t>(features.size()) != model.feature_count) {
    throw Error(ErrorCode::FeatureLengthMismatch,
                "feature vector length " + std::to_string(features.size()) +
                    " does not match the model's " + std::to_string(model.feature_count));
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.classes.size()));
  for (const DecisionTree& tree : model.trees) {
    mean += tree.leaf_probabilities(features);
  }
  mean /= static_cast<double>(model.trees.size());
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < mean.size(); ++c) {
    if (mean[c] > mean[best]) best = c;  // ties keep the lowest class id
  }
  return Prediction{model.classes[static_cast<std::size_t>(best)], std::move(mean)};
}

std::vector<ClassLabel> predict_labels(const ForestModel& model, const Eigen::MatrixXd& features) {
  std::vector<ClassLabel> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out.push_back(predict(model, features.row(i).transpose()).label);
  }
  return out;
}

}  // namespace shapelets
