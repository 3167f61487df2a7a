#pragma once

#include "gseg/types.hpp"

#include <filesystem>

namespace gseg {

// PNG conventions:
//   InstanceMap  16-bit grayscale, pixel value = instance ID (0 = background)
//   Mask          8-bit grayscale, 0 = 0 and 255 = 1, nothing else accepted
//   RawImage      8-bit grayscale or RGB, intensities scaled to [0, 1]
//   float plane  16-bit grayscale, [0, 1] scaled by 65535
// Loaders reject any other bit depth / channel count instead of converting.

InstanceMap load_instance_png(const std::filesystem::path& path);
void save_instance_png(const std::filesystem::path& path, const InstanceMap& z);

Mask load_mask_png(const std::filesystem::path& path);
void save_mask_png(const std::filesystem::path& path, const Mask& mask);

RawImage load_image_png(const std::filesystem::path& path);
void save_image_png(const std::filesystem::path& path, const RawImage& image);

PlaneF load_plane_png(const std::filesystem::path& path);
void save_plane_png(const std::filesystem::path& path, const PlaneF& plane);

}  // namespace gseg
