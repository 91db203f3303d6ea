#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "viewprep/depth_map.hpp"
#include "viewprep/sparse_model.hpp"

namespace viewprep {

struct SparseDepthEntry {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double depth = 0;
  int64_t point3d_id = kInvalidPoint3dId;
};

using SparseDepth = std::vector<SparseDepthEntry>;

struct AlignmentResult {
  double scale = 1.0;
  double shift = 0.0;
  size_t inlier_count = 0;
  std::vector<uint8_t> inlier_flags;  // per correspondence
  double residual_rms = 0.0;          // absolute residual over inliers, refit params
};

struct RansacParams {
  int iterations = 1000;
  double inlier_threshold = 0.05;  // relative: |a*m + b - s| / s
  // min_inliers <= 0 selects the default max(10, 20% of correspondences).
  int min_inliers = 0;
  uint64_t seed = 0;
  bool scale_only = false;  // 1-point hypotheses, b fixed to 0
};

// Camera-frame depths of the 3D points observed by image_id, keyed by the
// stored 2D observation coordinates. Behind-camera points are dropped.
// Throws for unregistered images or when no usable observation remains.
SparseDepth sparse_depth_for_image(const SparseModel& model, int32_t image_id);

// One (mono, sfm) correspondence per sparse entry whose nearest pixel in the
// mono map is valid.
struct DepthCorrespondences {
  std::vector<double> mono;
  std::vector<double> sfm;
};
DepthCorrespondences collect_correspondences(const DepthMap& mono,
                                             const SparseDepth& sparse);

// Robust affine fit d_sfm ~ scale * d_mono + shift from 2-point hypotheses,
// least-squares refit over the best hypothesis's inliers. Deterministic for
// a fixed seed, independent of thread count.
AlignmentResult ransac_align(const DepthMap& mono, const SparseDepth& sparse,
                             const RansacParams& params);

// Serial reference for the hypothesis search; kept for tests and benchmarks.
AlignmentResult ransac_align_serial(const DepthMap& mono,
                                    const SparseDepth& sparse,
                                    const RansacParams& params);

// values' = scale * values + shift; pixels driven to <= 0 become invalid.
DepthMap apply_alignment(const DepthMap& mono, const AlignmentResult& a);

}  // namespace viewprep
