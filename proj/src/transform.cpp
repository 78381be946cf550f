#include "shapelets/transform.hpp"

#include "shapelets/parallel.hpp"

namespace shapelets {

TransformMatrix shapelet_transform(const LabeledDataset& dataset,
                                   const std::vector<Shapelet>& shapelets,
                                   const DistanceOptions& opts, int threads) {
  if (shapelets.empty()) {
    throw Error(ErrorCode::EmptyShapeletSet, "cannot transform with an empty shapelet set");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  const Eigen::Index r = static_cast<Eigen::Index>(shapelets.size());

  // Fail fast with the offending pair instead of mid-parallel-loop.
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (shapelets[static_cast<std::size_t>(j)].length() > dataset.series(static_cast<std::size_t>(i)).length()) {
        throw Error(ErrorCode::ShapeletLongerThanSeries,
                    "shapelet " + std::to_string(j) + " (length " +
                        std::to_string(shapelets[static_cast<std::size_t>(j)].length()) +
                        ") exceeds series " + std::to_string(i) + " (length " +
                        std::to_string(dataset.series(static_cast<std::size_t>(i)).length()) + ")");
      }
    }
  }

  TransformMatrix out;
  out.values.resize(n, r);
  out.labels = dataset.labels();
  out.feature_ids.reserve(static_cast<std::size_t>(r));
  for (const Shapelet& s : shapelets) out.feature_ids.push_back(shapelet_id(s));

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      out.values(static_cast<Eigen::Index>(i), j) =
          subsequence_distance(shapelets[static_cast<std::size_t>(j)].values, dataset.series(i), opts);
    }
  });
  return out;
}

}  // namespace shapelets
