#include "gseg/labelgen.hpp"

#include "gseg/distance.hpp"

#include <map>

namespace gseg::labelgen {

Mask derive_edge_mask(const InstanceMap& z, EdgeBorder border) {
  validate_instance_map(z);
  const Eigen::Index h = z.rows(), w = z.cols();
  Mask edges = Mask::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const std::int32_t id = z(y, x);
      bool edge = false;
      const Eigen::Index ny[4] = {y - 1, y + 1, y, y};
      const Eigen::Index nx[4] = {x, x, x - 1, x + 1};
      for (int k = 0; k < 4 && !edge; ++k) {
        if (ny[k] >= 0 && ny[k] < h && nx[k] >= 0 && nx[k] < w)
          edge = z(ny[k], nx[k]) != id;
        else if (border == EdgeBorder::kBackground)
          edge = id != 0;
      }
      edges(y, x) = edge ? 1 : 0;
    }
  }
  return edges;
}

Mask dilate_mask(const Mask& mask, double radius) {
  validate_mask(mask);
  if (radius < 0) throw ValidationError("dilate_mask: radius must be >= 0");
  if (radius == 0 || !(mask == 1).any()) return mask;
  const PlaneD sq = squared_distance_transform(mask);
  return (sq <= radius * radius).cast<std::uint8_t>();
}

std::vector<BoundingBox> derive_boxes(const InstanceMap& z) {
  validate_instance_map(z);
  std::map<std::int32_t, BoundingBox> extrema;
  for (Eigen::Index y = 0; y < z.rows(); ++y) {
    for (Eigen::Index x = 0; x < z.cols(); ++x) {
      const std::int32_t id = z(y, x);
      if (id == 0) continue;
      auto [it, inserted] = extrema.try_emplace(id, BoundingBox{id, x, x, y, y});
      if (!inserted) {
        BoundingBox& b = it->second;
        b.x_min = std::min(b.x_min, x);
        b.x_max = std::max(b.x_max, x);
        b.y_min = std::min(b.y_min, y);
        b.y_max = std::max(b.y_max, y);
      }
    }
  }
  std::vector<BoundingBox> boxes;
  boxes.reserve(extrema.size());
  for (const auto& [id, box] : extrema) boxes.push_back(box);
  return boxes;
}

PlaneI fill_boxes(std::span<const BoundingBox> boxes, Eigen::Index height, Eigen::Index width) {
  for (const BoundingBox& b : boxes) {
    if (b.x_min < 0 || b.y_min < 0 || b.x_min > b.x_max || b.y_min > b.y_max ||
        b.x_max >= width || b.y_max >= height)
      throw ValidationError("fill_boxes: box " + std::to_string(b.id) +
                            " outside the " + std::to_string(height) + "x" +
                            std::to_string(width) + " extent");
  }
  // Difference array: +1/-1 at box corners, then prefix sums over both axes.
  PlaneI diff = PlaneI::Zero(height + 1, width + 1);
  for (const BoundingBox& b : boxes) {
    diff(b.y_min, b.x_min) += 1;
    diff(b.y_min, b.x_max + 1) -= 1;
    diff(b.y_max + 1, b.x_min) -= 1;
    diff(b.y_max + 1, b.x_max + 1) += 1;
  }
  PlaneI counts(height, width);
  for (Eigen::Index y = 0; y < height; ++y) {
    std::int32_t row_acc = 0;
    for (Eigen::Index x = 0; x < width; ++x) {
      row_acc += diff(y, x);
      counts(y, x) = row_acc + (y > 0 ? counts(y - 1, x) : 0);
    }
  }
  return counts;
}

}  // namespace gseg::labelgen
