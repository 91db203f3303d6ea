#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace viewprep {

// Interleaved 8-bit RGB image.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // size = width * height * 3

  Image8() = default;
  Image8(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(size_t(w) * h * 3, fill) {}

  size_t index(int x, int y, int c) const {
    return (size_t(y) * width + x) * 3 + c;
  }
  uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  bool operator==(const Image8& other) const = default;
};

// Binary mask, one byte per pixel holding 0 or 1.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Mask() = default;
  Mask(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(size_t(w) * h, fill ? 1 : 0) {}

  size_t index(int x, int y) const { return size_t(y) * width + x; }
  bool at(int x, int y) const { return data[index(x, y)] != 0; }
  void set(int x, int y, bool v) { data[index(x, y)] = v ? 1 : 0; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t v : data) n += v != 0;
    return n;
  }
  double coverage() const {
    return data.empty() ? 0.0
                        : static_cast<double>(count()) / double(data.size());
  }

  bool operator==(const Mask& other) const = default;
};

Image8 read_png_rgb(const std::filesystem::path& path);
void write_png_rgb(const Image8& image, const std::filesystem::path& path);

// Masks are stored as 1-bit grayscale PNG.
Mask read_png_mask(const std::filesystem::path& path);
void write_png_mask(const Mask& mask, const std::filesystem::path& path);

// 16-bit grayscale PNG depth with a "<path>.meta" sidecar declaring the
// scale factor (depth = raw * scale); raw 0 encodes an invalid pixel.
struct DepthMap;
DepthMap read_depth_png16(const std::filesystem::path& path);
void write_depth_png16(const DepthMap& depth, const std::filesystem::path& path);

}  // namespace viewprep
