#include "gseg/distance.hpp"

#include <vector>

namespace gseg {
namespace {

// 1-D squared-distance transform of a sampled function: d[q] = min_p (q-p)^2 + f[p].
// Lower envelope of parabolas; arg[q] receives the minimizing p.
void transform_1d(const double* f, Eigen::Index n, double* d, Eigen::Index* arg) {
  std::vector<Eigen::Index> v(n);
  std::vector<double> z(n + 1);
  Eigen::Index k = 0;
  v[0] = 0;
  z[0] = -kNoSite;
  z[1] = kNoSite;
  for (Eigen::Index q = 1; q < n; ++q) {
    double s;
    for (;;) {
      const Eigen::Index p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kNoSite;
  }
  k = 0;
  for (Eigen::Index q = 0; q < n; ++q) {
    while (z[k + 1] < double(q)) ++k;
    const Eigen::Index p = v[k];
    d[q] = double(q - p) * (q - p) + f[p];
    arg[q] = p;
  }
}

}  // namespace

PlaneI nearest_site_transform(const Mask& sites, PlaneD* sq_dist) {
  const Eigen::Index h = sites.rows(), w = sites.cols();
  PlaneD column_dist(h, w);
  PlaneI column_src(h, w);  // row of the nearest site within the same column
  const Eigen::Index n = std::max(h, w);
  std::vector<double> f(n), d(n);
  std::vector<Eigen::Index> arg(n);

  for (Eigen::Index x = 0; x < w; ++x) {
    for (Eigen::Index y = 0; y < h; ++y) f[y] = sites(y, x) ? 0.0 : kNoSite;
    transform_1d(f.data(), h, d.data(), arg.data());
    for (Eigen::Index y = 0; y < h; ++y) {
      column_dist(y, x) = d[y];
      column_src(y, x) = static_cast<std::int32_t>(arg[y]);
    }
  }

  PlaneI nearest(h, w);
  PlaneD dist(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) f[x] = column_dist(y, x);
    transform_1d(f.data(), w, d.data(), arg.data());
    for (Eigen::Index x = 0; x < w; ++x) {
      dist(y, x) = d[x];
      if (d[x] >= kNoSite) {
        nearest(y, x) = -1;
      } else {
        // The winning column is arg[x]; within it, the nearest site row for
        // this y was recorded by the first pass.
        const Eigen::Index site_col = arg[x];
        const Eigen::Index site_row = column_src(y, site_col);
        nearest(y, x) = static_cast<std::int32_t>(site_row * w + site_col);
      }
    }
  }
  if (sq_dist) *sq_dist = dist;
  return nearest;
}

PlaneD squared_distance_transform(const Mask& sites) {
  PlaneD dist;
  nearest_site_transform(sites, &dist);
  return dist;
}

}  // namespace gseg
