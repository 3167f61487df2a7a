#include "gseg/augment.hpp"

#include <algorithm>

namespace gseg::augment {

std::vector<RawImage> zero_mean(const std::vector<RawImage>& images, bool per_image) {
  if (images.empty()) throw ValidationError("zero_mean: empty image list");
  const int channels = images.front().channels();
  for (const RawImage& img : images)
    if (img.channels() != channels)
      throw ValidationError("zero_mean: images disagree on channel count");

  std::vector<RawImage> out = images;
  if (per_image) {
    for (RawImage& img : out)
      for (PlaneF& plane : img.planes) plane -= plane.mean();
    return out;
  }
  for (int c = 0; c < channels; ++c) {
    double sum = 0;
    double count = 0;
    for (const RawImage& img : images) {
      sum += img.planes[c].template cast<double>().sum();
      count += double(img.planes[c].size());
    }
    const float mean = static_cast<float>(sum / count);
    for (RawImage& img : out) img.planes[c] -= mean;
  }
  return out;
}

RadialWarp RadialWarp::create(Eigen::Index height, Eigen::Index width, double k1) {
  return create(height, width, k1, (double(height) - 1) / 2, (double(width) - 1) / 2);
}

RadialWarp RadialWarp::create(Eigen::Index height, Eigen::Index width, double k1, double center_y,
                              double center_x) {
  RadialWarp w;
  w.k1 = k1;
  w.center_y = center_y;
  w.center_x = center_x;
  w.half_diag = std::hypot((double(height) - 1) / 2, (double(width) - 1) / 2);
  if (w.half_diag == 0) w.half_diag = 1;

  // Monotone source radius requires 1 + 3*k1*r_hat^2 > 0 out to the farthest
  // corner.
  double far2 = 0;
  for (const double cy : {0.0, double(height) - 1})
    for (const double cx : {0.0, double(width) - 1}) {
      const double dy = cy - center_y, dx = cx - center_x;
      far2 = std::max(far2, (dy * dy + dx * dx) / (w.half_diag * w.half_diag));
    }
  if (1.0 + 3.0 * k1 * far2 <= 0.0)
    throw ValidationError("radial warp: k1 = " + std::to_string(k1) +
                          " makes the radial map non-monotone");
  return w;
}

PlaneF warp_bilinear(const PlaneF& p, const RadialWarp& warp) {
  const Eigen::Index h = p.rows(), w = p.cols();
  PlaneF out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double sy, sx;
      warp.source(double(y), double(x), sy, sx);
      sy = std::clamp(sy, 0.0, double(h - 1));
      sx = std::clamp(sx, 0.0, double(w - 1));
      const Eigen::Index y0 = Eigen::Index(std::floor(sy));
      const Eigen::Index x0 = Eigen::Index(std::floor(sx));
      const Eigen::Index y1 = std::min(y0 + 1, h - 1);
      const Eigen::Index x1 = std::min(x0 + 1, w - 1);
      const float fy = float(sy - double(y0));
      const float fx = float(sx - double(x0));
      out(y, x) = p(y0, x0) * (1 - fy) * (1 - fx) + p(y0, x1) * (1 - fy) * fx +
                  p(y1, x0) * fy * (1 - fx) + p(y1, x1) * fy * fx;
    }
  return out;
}

namespace {

void require_aligned(const Sample& s, const char* what) {
  for (const InstanceMap& label : s.labels)
    require_same_shape(label.rows(), label.cols(), s.image.height(), s.image.width(), what);
}

}  // namespace

Sample rot_flip(const Sample& s, int quarter_turns, bool horizontal_flip) {
  require_aligned(s, "rot_flip");
  Sample out;
  out.image.planes.reserve(s.image.planes.size());
  for (const PlaneF& plane : s.image.planes) {
    PlaneF t = rotate90(plane, quarter_turns);
    out.image.planes.push_back(horizontal_flip ? PlaneF(hflip(t)) : std::move(t));
  }
  out.labels.reserve(s.labels.size());
  for (const InstanceMap& label : s.labels) {
    InstanceMap t = rotate90(label, quarter_turns);
    out.labels.push_back(horizontal_flip ? InstanceMap(hflip(t)) : std::move(t));
  }
  return out;
}

Sample elastic_radial(const Sample& s, double k1) {
  require_aligned(s, "elastic_radial");
  const RadialWarp warp = RadialWarp::create(s.image.height(), s.image.width(), k1);
  Sample out;
  for (const PlaneF& plane : s.image.planes) out.image.planes.push_back(warp_bilinear(plane, warp));
  for (const InstanceMap& label : s.labels) out.labels.push_back(warp_nearest(label, warp));
  return out;
}

Sample elastic_radial(const Sample& s, double k1, double center_y, double center_x) {
  require_aligned(s, "elastic_radial");
  const RadialWarp warp =
      RadialWarp::create(s.image.height(), s.image.width(), k1, center_y, center_x);
  Sample out;
  for (const PlaneF& plane : s.image.planes) out.image.planes.push_back(warp_bilinear(plane, warp));
  for (const InstanceMap& label : s.labels) out.labels.push_back(warp_nearest(label, warp));
  return out;
}

Sample random_crop(const Sample& s, Eigen::Index size, Rng& rng) {
  require_aligned(s, "random_crop");
  const Eigen::Index h = s.image.height(), w = s.image.width();
  if (size <= 0 || size > std::min(h, w))
    throw ValidationError("random_crop: size " + std::to_string(size) +
                          " exceeds image extent " + std::to_string(h) + "x" + std::to_string(w));
  const Eigen::Index y0 = rng.uniform_int(0, h - size);
  const Eigen::Index x0 = rng.uniform_int(0, w - size);
  Sample out;
  for (const PlaneF& plane : s.image.planes) out.image.planes.push_back(crop(plane, y0, x0, size));
  for (const InstanceMap& label : s.labels) out.labels.push_back(crop(label, y0, x0, size));
  return out;
}

std::vector<std::pair<std::string, Sample>> augment_sample(const Sample& s,
                                                           const AugmentConfig& cfg,
                                                           std::uint64_t sample_index) {
  if (cfg.crop_size <= 0) throw ValidationError("augment: crop_size must be positive");
  if (cfg.k1_min > cfg.k1_max) throw ValidationError("augment: empty k1 range");

  Rng rng(cfg.seed, sample_index);
  std::vector<std::pair<std::string, Sample>> out;
  const char* names[4] = {"r000", "r090", "r180", "r270"};
  for (int flip = 0; flip < 2; ++flip) {
    for (int q = 0; q < 4; ++q) {
      std::string name = names[q];
      if (flip) name += 'f';
      Sample base = rot_flip(s, q, flip != 0);
      if (cfg.strategy == AugmentConfig::Strategy::kFlipRotateElastic) {
        const double k1 = rng.uniform(cfg.k1_min, cfg.k1_max);
        out.emplace_back(name + "e", random_crop(elastic_radial(base, k1), cfg.crop_size, rng));
      }
      out.emplace_back(std::move(name), random_crop(base, cfg.crop_size, rng));
    }
  }
  return out;
}

}  // namespace gseg::augment
