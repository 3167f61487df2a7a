#pragma once

#include "gseg/rng.hpp"
#include "gseg/types.hpp"

#include <cmath>
#include <vector>

namespace gseg::augment {

/// Subtract the per-channel mean computed over the whole list (or per image
/// when `per_image` is set). All images must share the channel count.
std::vector<RawImage> zero_mean(const std::vector<RawImage>& images, bool per_image = false);

/// Counterclockwise rotation by quarter_turns * 90 degrees.
template <typename T>
Plane<T> rotate90(const Plane<T>& p, int quarter_turns) {
  Plane<T> out;
  switch (((quarter_turns % 4) + 4) % 4) {
    case 0: out = p; break;
    case 1: out = p.transpose().colwise().reverse(); break;
    case 2: out = p.reverse(); break;
    default: out = p.transpose().rowwise().reverse(); break;
  }
  return out;
}

template <typename T>
Plane<T> hflip(const Plane<T>& p) {
  return p.rowwise().reverse();
}

template <typename T>
Plane<T> crop(const Plane<T>& p, Eigen::Index y0, Eigen::Index x0, Eigen::Index size) {
  if (size <= 0 || y0 < 0 || x0 < 0 || y0 + size > p.rows() || x0 + size > p.cols())
    throw ValidationError("crop: window outside the image");
  return p.block(y0, x0, size, size);
}

// Radial polynomial distortion: an output pixel at radius r (from `center`,
// normalized by the image half-diagonal) samples the input at radius
// r * (1 + k1 * r_hat^2) along the same ray. k1 > 0 gives pincushion,
// k1 < 0 barrel, k1 = 0 the identity.
struct RadialWarp {
  double k1 = 0;
  double center_y = 0, center_x = 0;
  double half_diag = 1;

  /// Center defaults to the image center; throws when the radial map is not
  /// monotone over the image.
  static RadialWarp create(Eigen::Index height, Eigen::Index width, double k1);
  static RadialWarp create(Eigen::Index height, Eigen::Index width, double k1, double center_y,
                           double center_x);

  void source(double y, double x, double& sy, double& sx) const {
    const double dy = y - center_y, dx = x - center_x;
    const double scale = 1.0 + k1 * (dy * dy + dx * dx) / (half_diag * half_diag);
    sy = center_y + dy * scale;
    sx = center_x + dx * scale;
  }
};

/// Bilinear sampling for intensity planes; out-of-range sources clamp to
/// the border.
PlaneF warp_bilinear(const PlaneF& p, const RadialWarp& warp);

/// Nearest-neighbor sampling for label planes, so no fractional IDs appear.
template <typename T>
Plane<T> warp_nearest(const Plane<T>& p, const RadialWarp& warp) {
  Plane<T> out(p.rows(), p.cols());
  for (Eigen::Index y = 0; y < p.rows(); ++y)
    for (Eigen::Index x = 0; x < p.cols(); ++x) {
      double sy, sx;
      warp.source(double(y), double(x), sy, sx);
      const Eigen::Index iy = std::clamp<Eigen::Index>(Eigen::Index(std::lround(sy)), 0, p.rows() - 1);
      const Eigen::Index ix = std::clamp<Eigen::Index>(Eigen::Index(std::lround(sx)), 0, p.cols() - 1);
      out(y, x) = p(iy, ix);
    }
  return out;
}

/// An image with the label maps that must stay aligned with it.
struct Sample {
  RawImage image;
  std::vector<InstanceMap> labels;
};

Sample rot_flip(const Sample& s, int quarter_turns, bool horizontal_flip);
Sample elastic_radial(const Sample& s, double k1);
Sample elastic_radial(const Sample& s, double k1, double center_y, double center_x);
Sample random_crop(const Sample& s, Eigen::Index size, Rng& rng);

struct AugmentConfig {
  enum class Strategy { kFlipRotate, kFlipRotateElastic };  // strategies I and II
  Strategy strategy = Strategy::kFlipRotate;
  Eigen::Index crop_size = 400;
  double k1_min = -0.15;
  double k1_max = 0.15;
  std::uint64_t seed = 0;
};

/// All augmented variants of one sample under the configured strategy:
/// the eight flip/rotation symmetries, plus one radial distortion of each
/// under strategy II, each randomly cropped to crop_size. Variant names
/// encode the transform (e.g. "r090f", "r180e").
std::vector<std::pair<std::string, Sample>> augment_sample(const Sample& s,
                                                           const AugmentConfig& cfg,
                                                           std::uint64_t sample_index);

}  // namespace gseg::augment
