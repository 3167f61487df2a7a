#include "gseg/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <memory>
#include <vector>

namespace gseg {
namespace {

// Dataset images are sub-megapixel; anything past this cap is a mistake, not
// a streaming use case.
constexpr Eigen::Index kMaxPixels = Eigen::Index(1) << 26;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_to_exception(png_structp, png_const_charp msg) {
  throw IoError(std::string("libpng: ") + msg);
}

void png_warning_ignore(png_structp, png_const_charp) {}

struct Decoded {
  Eigen::Index height = 0;
  Eigen::Index width = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint16_t> data;  // interleaved, host byte order
};

Decoded decode_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_to_exception, png_warning_ignore);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  Decoded out;
  try {
    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE)
      throw ValidationError(path.string() + ": palette PNG not supported");
    if (out.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (out.bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);
    out.height = static_cast<Eigen::Index>(h);
    out.width = static_cast<Eigen::Index>(w);
    if (out.height * out.width > kMaxPixels)
      throw ValidationError(path.string() + ": image exceeds supported size");

    const std::size_t samples = std::size_t(out.height) * std::size_t(out.width) * out.channels;
    out.data.resize(samples);
    const std::size_t stride = std::size_t(out.width) * out.channels;
    std::vector<png_bytep> rows(out.height);
    if (out.bit_depth == 16) {
      for (Eigen::Index y = 0; y < out.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(out.data.data() + y * stride);
      png_read_image(png, rows.data());
    } else {
      std::vector<std::uint8_t> bytes(samples);
      for (Eigen::Index y = 0; y < out.height; ++y) rows[y] = bytes.data() + y * stride;
      png_read_image(png, rows.data());
      std::copy(bytes.begin(), bytes.end(), out.data.begin());
    }
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void encode_png(const std::filesystem::path& path, Eigen::Index height, Eigen::Index width,
                int channels, int bit_depth, const std::uint16_t* data16,
                const std::uint8_t* data8) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_to_exception, png_warning_ignore);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  try {
    png_init_io(png, file.get());
    const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);

    const std::size_t stride = std::size_t(width) * channels;
    std::vector<png_bytep> rows(height);
    for (Eigen::Index y = 0; y < height; ++y) {
      rows[y] = bit_depth == 16
                    ? reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(data16) + y * stride)
                    : const_cast<std::uint8_t*>(data8) + y * stride;
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

}  // namespace

InstanceMap load_instance_png(const std::filesystem::path& path) {
  const Decoded d = decode_png(path);
  if (d.bit_depth != 16)
    throw ValidationError(path.string() + ": instance map must be 16-bit, got " +
                          std::to_string(d.bit_depth) + "-bit");
  if (d.channels != 1)
    throw ValidationError(path.string() + ": instance map must be single-channel, got " +
                          std::to_string(d.channels) + " channels");
  InstanceMap z(d.height, d.width);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = d.data[i];
  return z;
}

void save_instance_png(const std::filesystem::path& path, const InstanceMap& z) {
  validate_instance_map(z);
  if ((z > 65535).any()) throw ValidationError("instance ID exceeds 16-bit PNG range");
  std::vector<std::uint16_t> buf(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) buf[i] = static_cast<std::uint16_t>(z.data()[i]);
  encode_png(path, z.rows(), z.cols(), 1, 16, buf.data(), nullptr);
}

Mask load_mask_png(const std::filesystem::path& path) {
  const Decoded d = decode_png(path);
  if (d.bit_depth != 8)
    throw ValidationError(path.string() + ": mask must be 8-bit, got " +
                          std::to_string(d.bit_depth) + "-bit");
  if (d.channels != 1)
    throw ValidationError(path.string() + ": mask must be single-channel, got " +
                          std::to_string(d.channels) + " channels");
  Mask m(d.height, d.width);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const std::uint16_t v = d.data[i];
    if (v != 0 && v != 255)
      throw ValidationError(path.string() + ": mask pixel value " + std::to_string(v) +
                            " (only 0 and 255 allowed)");
    m.data()[i] = v == 255 ? 1 : 0;
  }
  return m;
}

void save_mask_png(const std::filesystem::path& path, const Mask& mask) {
  validate_mask(mask);
  std::vector<std::uint8_t> buf(mask.size());
  for (Eigen::Index i = 0; i < mask.size(); ++i) buf[i] = mask.data()[i] ? 255 : 0;
  encode_png(path, mask.rows(), mask.cols(), 1, 8, nullptr, buf.data());
}

RawImage load_image_png(const std::filesystem::path& path) {
  const Decoded d = decode_png(path);
  if (d.bit_depth != 8)
    throw ValidationError(path.string() + ": image must be 8-bit, got " +
                          std::to_string(d.bit_depth) + "-bit");
  if (d.channels != 1 && d.channels != 3)
    throw ValidationError(path.string() + ": image must have 1 or 3 channels, got " +
                          std::to_string(d.channels));
  RawImage img;
  img.planes.assign(d.channels, PlaneF(d.height, d.width));
  for (Eigen::Index y = 0; y < d.height; ++y)
    for (Eigen::Index x = 0; x < d.width; ++x)
      for (int c = 0; c < d.channels; ++c)
        img.planes[c](y, x) = float(d.data[(y * d.width + x) * d.channels + c]) / 255.0f;
  return img;
}

void save_image_png(const std::filesystem::path& path, const RawImage& image) {
  if (image.channels() != 1 && image.channels() != 3)
    throw ValidationError("image must have 1 or 3 channels");
  const Eigen::Index h = image.height(), w = image.width();
  const int c = image.channels();
  std::vector<std::uint8_t> buf(std::size_t(h) * w * c);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) {
        const float v = std::clamp(image.planes[k](y, x), 0.0f, 1.0f);
        buf[(y * w + x) * c + k] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
  encode_png(path, h, w, c, 8, nullptr, buf.data());
}

PlaneF load_plane_png(const std::filesystem::path& path) {
  const Decoded d = decode_png(path);
  if (d.bit_depth != 16 || d.channels != 1)
    throw ValidationError(path.string() + ": float plane must be a 16-bit single-channel PNG");
  PlaneF p(d.height, d.width);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = float(d.data[i]) / 65535.0f;
  return p;
}

void save_plane_png(const std::filesystem::path& path, const PlaneF& plane) {
  std::vector<std::uint16_t> buf(plane.size());
  for (Eigen::Index i = 0; i < plane.size(); ++i) {
    const float v = std::clamp(plane.data()[i], 0.0f, 1.0f);
    buf[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0f));
  }
  encode_png(path, plane.rows(), plane.cols(), 1, 16, buf.data(), nullptr);
}

}  // namespace gseg
