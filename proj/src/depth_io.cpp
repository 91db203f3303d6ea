#include "viewprep/depth_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "viewprep/image.hpp"

namespace viewprep {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

DepthMap invert_depth(const DepthMap& map) {
  DepthMap out(map.width, map.height);
  for (size_t i = 0; i < map.values.size(); ++i) {
    if (map.valid[i] && map.values[i] > 0.0) {
      out.values[i] = 1.0 / map.values[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

DepthMap read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("missing PFM file: " + path.string());

  std::string magic;
  int width = 0, height = 0;
  double scale = 0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "Pf") {
    fail("not a grayscale PFM file: " + path.string());
  }
  if (width <= 0 || height <= 0) fail("bad PFM dimensions in " + path.string());
  // Single whitespace byte separates the header from the raster.
  in.get();

  std::vector<float> raster(size_t(width) * height);
  in.read(reinterpret_cast<char*>(raster.data()),
          static_cast<std::streamsize>(raster.size() * sizeof(float)));
  if (!in) fail("truncated PFM raster in " + path.string());
  if (scale > 0) fail("big-endian PFM not supported: " + path.string());
  const double magnitude = -scale;

  DepthMap depth(width, height);
  // PFM rows run bottom-to-top.
  for (int y = 0; y < height; ++y) {
    const float* row = raster.data() + size_t(height - 1 - y) * width;
    for (int x = 0; x < width; ++x) {
      const double v = double(row[x]) * magnitude;
      if (std::isfinite(v) && v > 0.0) depth.set(x, y, v);
    }
  }
  return depth;
}

void write_pfm(const DepthMap& depth, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("unwritable path: " + path.string());

  out << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
  std::vector<float> row(depth.width);
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x) {
      row[x] = depth.is_valid(x, y) ? static_cast<float>(depth.at(x, y)) : 0.0f;
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) fail("write failed: " + path.string());
}

DepthMap read_depth(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pfm") return read_pfm(path);
  if (ext == ".png") return read_depth_png16(path);
  fail("unsupported depth format: " + path.string());
}

void write_depth(const DepthMap& depth, const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pfm") return write_pfm(depth, path);
  if (ext == ".png") return write_depth_png16(depth, path);
  fail("unsupported depth format: " + path.string());
}

}  // namespace viewprep
