#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "viewprep/camera.hpp"
#include "viewprep/depth_map.hpp"
#include "viewprep/image.hpp"
#include "viewprep/sparse_model.hpp"

namespace viewprep {

struct WarpMesh {
  struct Vertex {
    Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
    std::array<uint8_t, 3> rgb = {0, 0, 0};
  };
  std::vector<Vertex> vertices;
  std::vector<std::array<uint32_t, 3>> triangles;
};

struct WarpOutput {
  Image8 rgb;
  Mask mask;
  DepthMap depth;  // target-camera z where mask is true
};

// One vertex per valid depth pixel, unprojected at the pixel center; every
// all-valid 2x2 quad contributes two triangles split along the main
// diagonal. A triangle whose source depths spread by more than
// discontinuity_threshold (relative to the min) is dropped; a negative
// threshold disables the filter.
WarpMesh build_mesh(const Image8& rgb, const DepthMap& depth,
                    const CameraIntrinsics& camera, const Pose& pose,
                    double discontinuity_threshold);

// Z-buffered rasterization with perspective-correct interpolation at pixel
// centers (x+0.5, y+0.5). Coverage is edge-inclusive; depth ties keep the
// lower triangle index. Triangles with any behind-camera vertex are
// discarded. Output is identical for the serial and parallel variants.
WarpOutput rasterize(const WarpMesh& mesh, const CameraIntrinsics& camera,
                     const Pose& pose,
                     const std::array<uint8_t, 3>& sentinel_rgb = {0, 0, 0});

// Serial reference implementation; kept for tests and benchmarks.
WarpOutput rasterize_serial(const WarpMesh& mesh, const CameraIntrinsics& camera,
                            const Pose& pose,
                            const std::array<uint8_t, 3>& sentinel_rgb = {0, 0, 0});

struct WarpConfig {
  double discontinuity_threshold = 0.1;
  std::array<uint8_t, 3> sentinel_rgb = {0, 0, 0};
};

// build_mesh on the reference RGBD, then rasterize from the target camera.
WarpOutput warp(const Image8& ref_rgb, const DepthMap& aligned_depth,
                const CameraIntrinsics& ref_camera, const Pose& ref_pose,
                const CameraIntrinsics& tgt_camera, const Pose& tgt_pose,
                const WarpConfig& config = {});

}  // namespace viewprep
