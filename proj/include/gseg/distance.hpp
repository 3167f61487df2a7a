#pragma once

#include "gseg/types.hpp"

namespace gseg {

/// Value standing in for "no site anywhere"; larger than any squared
/// distance a supported image can produce.
inline constexpr double kNoSite = 1e12;

/// Exact squared Euclidean distance to the nearest 1-pixel of `sites`
/// (two-pass lower-envelope transform). Entries are exact integers in
/// double precision; pixels of `sites` get 0, and every entry is >= kNoSite
/// when `sites` has no 1-pixels.
PlaneD squared_distance_transform(const Mask& sites);

/// Row-major flat index of an exactly nearest site pixel for every pixel,
/// -1 where no site exists. Equidistant sites resolve deterministically by
/// scan order. Optionally also returns the squared distances.
PlaneI nearest_site_transform(const Mask& sites, PlaneD* sq_dist = nullptr);

}  // namespace gseg
