#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gseg {

// All pixel grids are dense row-major Eigen arrays indexed (y, x) with the
// origin at the top-left corner; x is the column index, y the row index.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneF = Plane<float>;
using PlaneD = Plane<double>;
using PlaneI = Plane<std::int32_t>;
using PlaneU8 = Plane<std::uint8_t>;

/// Per-pixel instance IDs, 0 = background. Distinct nonzero values are the
/// instances; IDs need not be contiguous.
using InstanceMap = PlaneI;
/// Binary per-pixel labels with values in {0,1}.
using Mask = PlaneU8;

struct Pixel {
  Eigen::Index y = 0;
  Eigen::Index x = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Inclusive pixel extents of one instance.
struct BoundingBox {
  std::int32_t id = 0;
  Eigen::Index x_min = 0;
  Eigen::Index x_max = 0;
  Eigen::Index y_min = 0;
  Eigen::Index y_max = 0;

  Eigen::Index width() const { return x_max - x_min + 1; }
  Eigen::Index height() const { return y_max - y_min + 1; }
  Eigen::Index area() const { return width() * height(); }
  bool contains(Eigen::Index y, Eigen::Index x) const {
    return y >= y_min && y <= y_max && x >= x_min && x <= x_max;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Multichannel float image; 1 (gray) or 3 (RGB) planes of equal extent.
struct RawImage {
  std::vector<PlaneF> planes;

  Eigen::Index height() const { return planes.empty() ? 0 : planes.front().rows(); }
  Eigen::Index width() const { return planes.empty() ? 0 : planes.front().cols(); }
  int channels() const { return static_cast<int>(planes.size()); }
};

enum class DetectionRule {
  kIntersectionOverGt,  // |S∩G|/|G| strictly above threshold (challenge convention)
  kIou,                 // |S∩G|/|S∪G| at or above threshold
};

struct MetricConfig {
  double iou_threshold = 0.5;
  DetectionRule detection_rule = DetectionRule::kIntersectionOverGt;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validate_metric_config(const MetricConfig& cfg) {
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold <= 1.0))
    throw ValidationError("iou_threshold must be in (0, 1]");
}

inline void require_same_shape(const Eigen::Index rows_a, const Eigen::Index cols_a,
                               const Eigen::Index rows_b, const Eigen::Index cols_b,
                               const char* what) {
  if (rows_a != rows_b || cols_a != cols_b)
    throw ValidationError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(rows_a) + "x" + std::to_string(cols_a) + " vs " +
                          std::to_string(rows_b) + "x" + std::to_string(cols_b) + ")");
}

template <typename A, typename B>
void require_same_shape(const Plane<A>& a, const Plane<B>& b, const char* what) {
  require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), what);
}

inline void validate_mask(const Mask& m, const char* what = "mask") {
  if ((m > 1).any()) throw ValidationError(std::string(what) + ": values must be 0 or 1");
}

inline void validate_instance_map(const InstanceMap& z) {
  if ((z < 0).any()) throw ValidationError("instance map: negative instance ID");
}

/// Sorted distinct nonzero instance IDs present in the map.
std::vector<std::int32_t> instance_ids(const InstanceMap& z);

/// Number of distinct nonzero instance IDs (the map's K).
inline Eigen::Index instance_count(const InstanceMap& z) {
  return static_cast<Eigen::Index>(instance_ids(z).size());
}

/// Pixel coordinate set of every nonzero instance, row-major order per ID.
/// The sets are pairwise disjoint and, together with the background pixels,
/// cover the whole image by construction.
std::map<std::int32_t, std::vector<Pixel>> instance_regions(const InstanceMap& z);

/// Per-instance pixel areas (nonzero IDs only).
std::map<std::int32_t, Eigen::Index> instance_areas(const InstanceMap& z);

}  // namespace gseg
