#include "gseg/postprocess.hpp"

#include "gseg/distance.hpp"

#include <map>
#include <set>
#include <vector>

namespace gseg::post {
namespace {

using Eigen::Index;

void check_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw ValidationError("connectivity must be 4 or 8");
}

// Flood-fill labeling of the predicate's true pixels, row-major discovery
// order, labels from 1.
template <typename Predicate>
PlaneI label_components(Index h, Index w, int connectivity, Predicate inside) {
  PlaneI labels = PlaneI::Zero(h, w);
  std::vector<Pixel> stack;
  std::int32_t next = 0;
  const int n_offsets = connectivity == 4 ? 4 : 8;
  static constexpr Index oy[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr Index ox[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      if (!inside(y, x) || labels(y, x) != 0) continue;
      ++next;
      labels(y, x) = next;
      stack.push_back({y, x});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < n_offsets; ++k) {
          const Index ny = p.y + oy[k], nx = p.x + ox[k];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (!inside(ny, nx) || labels(ny, nx) != 0) continue;
          labels(ny, nx) = next;
          stack.push_back({ny, nx});
        }
      }
    }
  return labels;
}

}  // namespace

Mask binarize_argmax(const PlaneF& background, const PlaneF& foreground) {
  require_same_shape(background, foreground, "binarize_argmax");
  return (foreground > background).cast<std::uint8_t>();
}

InstanceMap extract_instances(const Mask& mask, int connectivity) {
  validate_mask(mask);
  check_connectivity(connectivity);
  return label_components(mask.rows(), mask.cols(), connectivity,
                          [&](Index y, Index x) { return mask(y, x) != 0; });
}

InstanceMap extract_instances_edge_split(const Mask& mask, const Mask& edges, int connectivity) {
  validate_mask(mask);
  validate_mask(edges, "edge mask");
  require_same_shape(mask, edges, "extract_instances_edge_split");
  check_connectivity(connectivity);

  const Mask core = (mask == 1 && edges == 0).cast<std::uint8_t>();
  InstanceMap labels = label_components(mask.rows(), mask.cols(), connectivity,
                                        [&](Index y, Index x) { return core(y, x) != 0; });
  if ((labels != 0).any()) {
    const PlaneI nearest = nearest_site_transform(core);
    for (Index y = 0; y < mask.rows(); ++y)
      for (Index x = 0; x < mask.cols(); ++x)
        if (mask(y, x) != 0 && labels(y, x) == 0) {
          const std::int32_t site = nearest(y, x);
          labels(y, x) = labels(site / mask.cols(), site % mask.cols());
        }
  }
  return labels;
}

InstanceMap remove_small(const InstanceMap& z, Eigen::Index min_area) {
  validate_instance_map(z);
  if (min_area < 0) throw ValidationError("remove_small: min_area must be >= 0");
  const std::map<std::int32_t, Index> areas = instance_areas(z);
  InstanceMap out = z;
  for (Index i = 0; i < out.size(); ++i) {
    const std::int32_t id = out.data()[i];
    if (id != 0 && areas.at(id) < min_area) out.data()[i] = 0;
  }
  return out;
}

InstanceMap fill_holes(const InstanceMap& z) {
  validate_instance_map(z);
  const Index h = z.rows(), w = z.cols();
  const PlaneI holes =
      label_components(h, w, 4, [&](Index y, Index x) { return z(y, x) == 0; });

  const std::int32_t n_components = holes.maxCoeff();
  if (n_components == 0) return z;
  std::vector<bool> touches_border(n_components + 1, false);
  std::vector<std::set<std::int32_t>> adjacent(n_components + 1);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const std::int32_t c = holes(y, x);
      if (c == 0) continue;
      if (y == 0 || y == h - 1 || x == 0 || x == w - 1) touches_border[c] = true;
      const Index ny[4] = {y - 1, y + 1, y, y};
      const Index nx[4] = {x, x, x - 1, x + 1};
      for (int k = 0; k < 4; ++k) {
        if (ny[k] < 0 || ny[k] >= h || nx[k] < 0 || nx[k] >= w) continue;
        if (const std::int32_t id = z(ny[k], nx[k]); id != 0) adjacent[c].insert(id);
      }
    }

  InstanceMap out = z;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const std::int32_t c = holes(y, x);
      if (c != 0 && !touches_border[c] && adjacent[c].size() == 1)
        out(y, x) = *adjacent[c].begin();
    }
  return out;
}

}  // namespace gseg::post
