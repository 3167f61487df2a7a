#pragma once

#include "gseg/types.hpp"

namespace gseg::post {

/// Per-pixel argmax over a two-class probability pair; class 1 (foreground)
/// wins only strictly, so an exact tie resolves to background.
Mask binarize_argmax(const PlaneF& background, const PlaneF& foreground);

/// Label maximal connected foreground components with distinct IDs in
/// row-major discovery order. Connectivity 4 or 8.
InstanceMap extract_instances(const Mask& mask, int connectivity = 4);

/// Like extract_instances, but foreground pixels flagged by `edges` are
/// withheld from labeling and afterwards reassigned to the nearest surviving
/// component (Euclidean). Flagged pixels with no surviving component become
/// background.
InstanceMap extract_instances_edge_split(const Mask& mask, const Mask& edges,
                                         int connectivity = 4);

/// Drop instances with pixel count strictly below min_area; survivors keep
/// their IDs.
InstanceMap remove_small(const InstanceMap& z, Eigen::Index min_area);

/// Fill background components that do not reach the image border
/// (4-connectivity) with the ID of their unique enclosing instance; holes
/// touching two or more instances stay unfilled.
InstanceMap fill_holes(const InstanceMap& z);

}  // namespace gseg::post
