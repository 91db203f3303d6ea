#pragma once

#include <cstdint>
#include <vector>

namespace viewprep {

// Per-pixel depth with validity. Values are finite and > 0 wherever valid;
// invalid pixels carry 0 (matching the on-disk encoding).
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<uint8_t> valid;

  DepthMap() = default;
  DepthMap(int w, int h)
      : width(w), height(h), values(size_t(w) * h, 0.0), valid(size_t(w) * h, 0) {}

  size_t index(int x, int y) const { return size_t(y) * width + x; }
  double at(int x, int y) const { return values[index(x, y)]; }
  bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }

  void set(int x, int y, double value) {
    values[index(x, y)] = value;
    valid[index(x, y)] = 1;
  }
  void invalidate(int x, int y) {
    values[index(x, y)] = 0.0;
    valid[index(x, y)] = 0;
  }

  size_t valid_count() const {
    size_t n = 0;
    for (uint8_t v : valid) n += v != 0;
    return n;
  }
};

// Reinterprets a disparity-style map as depth (1/value). Non-positive input
// pixels become invalid.
DepthMap invert_depth(const DepthMap& map);

}  // namespace viewprep
