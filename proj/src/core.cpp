#include "gseg/types.hpp"

#include <set>

namespace gseg {

std::vector<std::int32_t> instance_ids(const InstanceMap& z) {
  std::set<std::int32_t> ids;
  const std::int32_t* p = z.data();
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (p[i] != 0) ids.insert(p[i]);
  return {ids.begin(), ids.end()};
}

std::map<std::int32_t, std::vector<Pixel>> instance_regions(const InstanceMap& z) {
  validate_instance_map(z);
  std::map<std::int32_t, std::vector<Pixel>> regions;
  for (Eigen::Index y = 0; y < z.rows(); ++y)
    for (Eigen::Index x = 0; x < z.cols(); ++x)
      if (const std::int32_t id = z(y, x); id != 0) regions[id].push_back({y, x});
  return regions;
}

std::map<std::int32_t, Eigen::Index> instance_areas(const InstanceMap& z) {
  std::map<std::int32_t, Eigen::Index> areas;
  for (Eigen::Index y = 0; y < z.rows(); ++y)
    for (Eigen::Index x = 0; x < z.cols(); ++x)
      if (const std::int32_t id = z(y, x); id != 0) ++areas[id];
  return areas;
}

}  // namespace gseg
