#pragma once

#include "gseg/types.hpp"

#include <span>

namespace gseg::labelgen {

// What an out-of-bounds neighbor counts as in the edge rule. kReplicate
// treats it as carrying the center pixel's ID, so image borders are not
// automatically edges; kBackground treats it as ID 0.
enum class EdgeBorder { kReplicate, kBackground };

/// A pixel is an edge (1) unless it and its four nearest neighbors (over,
/// below, right, left) all carry the same instance ID; background counts as
/// an ID of its own.
Mask derive_edge_mask(const InstanceMap& z, EdgeBorder border = EdgeBorder::kReplicate);

/// Disk dilation: output pixel is 1 iff some 1-pixel of `mask` lies within
/// Euclidean distance `radius`. Radius 0 is the identity.
Mask dilate_mask(const Mask& mask, double radius);

/// Tight axis-aligned bounding box of every nonzero instance, ascending ID.
std::vector<BoundingBox> derive_boxes(const InstanceMap& z);

/// Per-pixel count of boxes whose closed rectangle contains the pixel.
PlaneI fill_boxes(std::span<const BoundingBox> boxes, Eigen::Index height, Eigen::Index width);

}  // namespace gseg::labelgen
