#pragma once

#include <filesystem>

#include "viewprep/depth_map.hpp"

namespace viewprep {

// Portable float map, grayscale ("Pf"), little-endian (negative scale
// header), rows bottom-to-top. Value 0 encodes an invalid pixel.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);

// Dispatches on extension: .pfm or .png (16-bit gray + sidecar scale).
DepthMap read_depth(const std::filesystem::path& path);
void write_depth(const DepthMap& depth, const std::filesystem::path& path);

}  // namespace viewprep
