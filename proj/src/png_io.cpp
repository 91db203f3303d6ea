#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "viewprep/depth_map.hpp"
#include "viewprep/image.hpp"

namespace viewprep {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void read_rows(const fs::path& path, int transforms_bit_depth,
               bool keep_16bit, int& width, int& height, int& channels,
               std::vector<std::vector<png_byte>>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail("missing PNG file: " + path.string());

  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) fail("png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) fail("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(r.png))) fail("failed to decode PNG: " + path.string());

  png_init_io(r.png, fp.get());
  png_read_info(r.png, r.info);

  width = int(png_get_image_width(r.png, r.info));
  height = int(png_get_image_height(r.png, r.info));
  const int color = png_get_color_type(r.png, r.info);
  const int depth = png_get_bit_depth(r.png, r.info);

  if (transforms_bit_depth == 8) {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    if (depth == 16) png_set_strip_16(r.png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(r.png);
    }
    png_set_strip_alpha(r.png);
  } else if (keep_16bit) {
    if (color != PNG_COLOR_TYPE_GRAY || depth != 16) {
      fail("expected 16-bit grayscale PNG: " + path.string());
    }
    png_set_swap(r.png);  // stored big-endian in the file
  }

  png_read_update_info(r.png, r.info);
  channels = png_get_channels(r.png, r.info);
  const size_t rowbytes = png_get_rowbytes(r.png, r.info);

  rows.assign(height, std::vector<png_byte>(rowbytes));
  std::vector<png_bytep> row_ptrs(height);
  for (int y = 0; y < height; ++y) row_ptrs[y] = rows[y].data();
  png_read_image(r.png, row_ptrs.data());
  png_read_end(r.png, nullptr);
}

void write_rows(const fs::path& path, int width, int height, int bit_depth,
                int color_type, const std::vector<png_bytep>& row_ptrs,
                bool swap16 = false) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("unwritable path: " + path.string());

  PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!w.png) fail("png_create_write_struct failed");
  w.info = png_create_info_struct(w.png);
  if (!w.info) fail("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(w.png))) fail("failed to encode PNG: " + path.string());

  png_init_io(w.png, fp.get());
  png_set_IHDR(w.png, w.info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  if (swap16) png_set_swap(w.png);
  png_write_image(w.png, const_cast<png_bytepp>(row_ptrs.data()));
  png_write_end(w.png, nullptr);
}

double read_sidecar_scale(const fs::path& meta_path) {
  std::ifstream in(meta_path);
  if (!in) fail("missing depth sidecar: " + meta_path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    if (line.substr(0, eq) == "scale") return std::stod(line.substr(eq + 1));
  }
  fail("no scale entry in depth sidecar: " + meta_path.string());
}

}  // namespace

Image8 read_png_rgb(const fs::path& path) {
  int width, height, channels;
  std::vector<std::vector<png_byte>> rows;
  read_rows(path, 8, false, width, height, channels, rows);
  if (channels != 3) fail("expected RGB after expansion: " + path.string());

  Image8 image(width, height);
  for (int y = 0; y < height; ++y) {
    std::copy(rows[y].begin(), rows[y].end(),
              image.data.begin() + image.index(0, y, 0));
  }
  return image;
}

void write_png_rgb(const Image8& image, const fs::path& path) {
  std::vector<png_bytep> row_ptrs(image.height);
  for (int y = 0; y < image.height; ++y) {
    row_ptrs[y] = const_cast<png_bytep>(image.data.data() + image.index(0, y, 0));
  }
  write_rows(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, row_ptrs);
}

Mask read_png_mask(const fs::path& path) {
  int width, height, channels;
  std::vector<std::vector<png_byte>> rows;
  read_rows(path, 8, false, width, height, channels, rows);

  Mask mask(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      mask.set(x, y, rows[y][size_t(x) * channels] != 0);
    }
  }
  return mask;
}

void write_png_mask(const Mask& mask, const fs::path& path) {
  const size_t rowbytes = (size_t(mask.width) + 7) / 8;
  std::vector<std::vector<png_byte>> rows(mask.height,
                                          std::vector<png_byte>(rowbytes, 0));
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) rows[y][x / 8] |= png_byte(0x80 >> (x % 8));
    }
  }
  std::vector<png_bytep> row_ptrs(mask.height);
  for (int y = 0; y < mask.height; ++y) row_ptrs[y] = rows[y].data();
  write_rows(path, mask.width, mask.height, 1, PNG_COLOR_TYPE_GRAY, row_ptrs);
}

DepthMap read_depth_png16(const fs::path& path) {
  const double scale = read_sidecar_scale(path.string() + ".meta");

  int width, height, channels;
  std::vector<std::vector<png_byte>> rows;
  read_rows(path, 16, true, width, height, channels, rows);

  DepthMap depth(width, height);
  for (int y = 0; y < height; ++y) {
    const uint16_t* row = reinterpret_cast<const uint16_t*>(rows[y].data());
    for (int x = 0; x < width; ++x) {
      if (row[x] != 0) depth.set(x, y, double(row[x]) * scale);
    }
  }
  return depth;
}

void write_depth_png16(const DepthMap& depth, const fs::path& path) {
  // Scale chosen so the max depth maps to the top of the 16-bit range.
  double max_value = 0;
  for (size_t i = 0; i < depth.values.size(); ++i) {
    if (depth.valid[i]) max_value = std::max(max_value, depth.values[i]);
  }
  const double scale = max_value > 0 ? max_value / 65535.0 : 1.0;

  std::vector<std::vector<uint16_t>> rows(depth.height,
                                          std::vector<uint16_t>(depth.width, 0));
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (!depth.is_valid(x, y)) continue;
      const long raw = std::lround(depth.at(x, y) / scale);
      rows[y][x] = static_cast<uint16_t>(std::clamp(raw, 1L, 65535L));
    }
  }
  std::vector<png_bytep> row_ptrs(depth.height);
  for (int y = 0; y < depth.height; ++y) {
    row_ptrs[y] = reinterpret_cast<png_bytep>(rows[y].data());
  }
  write_rows(path, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY, row_ptrs,
             /*swap16=*/true);

  std::ofstream meta(path.string() + ".meta");
  if (!meta) fail("unwritable sidecar for " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", scale);
  meta << "scale=" << buf << "\n";
}

}  // namespace viewprep
