#pragma once

#include <vector>

#include "shapelets/discovery.hpp"
#include "shapelets/types.hpp"

namespace shapelets {

/// Builds matrix G: G(i, j) = subsequence_distance(shapelet j, series i),
/// labels carried per row, columns in the given shapelet order. Distance
/// options must match the ones used at discovery time.
TransformMatrix shapelet_transform(const LabeledDataset& dataset,
                                   const std::vector<Shapelet>& shapelets,
                                   const DistanceOptions& opts = {},
                                   int threads = 1);

}  // namespace shapelets
