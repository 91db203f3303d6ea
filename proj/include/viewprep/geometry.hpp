#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "viewprep/depth_map.hpp"
#include "viewprep/sparse_model.hpp"

namespace viewprep {

// Maps reference-camera coordinates to target-camera coordinates.
struct RelativePose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& ref_cam) const {
    return rotation * ref_cam + translation;
  }
};

// Row-major flattened 3x4 extrinsic (rotation 9 + scaled translation 3)
// followed by the vertical field of view in radians.
using ConditioningVector = std::array<double, 13>;

// World-coordinate rigid transform: x' = rotation * x + translation.
struct RigidTransform {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

// rel such that rel(ref(X)) == tgt(X) for all world points X.
RelativePose relative_pose(const Pose& ref, const Pose& tgt);

// Nearest-rank quantile (value at index ceil(q*n)-1 of the ascending valid
// depths). Throws if there is no valid pixel or q is outside (0, 1).
double depth_quantile_scale(const DepthMap& depth, double q);

// Same nearest-rank rule over a plain list of depth values.
double depth_quantile_scale(std::span<const double> depths, double q);

// Requires scale > 0 and fov in (0, pi).
ConditioningVector build_conditioning(const RelativePose& rel,
                                      double fov_vertical, double scale);

struct GravityAlignment {
  SparseModel model;
  RigidTransform transform;
};

// Rigidly rotates the model so the mean camera down-axis (camera +y in world
// coordinates) becomes (0,0,-1), i.e. world up = +z. Reprojections are
// unchanged. Throws when the mean down-axis is degenerate or the model has
// no registered image.
GravityAlignment gravity_align(const SparseModel& model);

// For a gravity-aligned model: sorts images by the horizontal-plane angle
// (atan2 of the y and x components) of their viewing direction and returns
// image ids at indices floor(i*n/k), i in 0..k-1.
std::vector<int32_t> sample_orbit_references(const SparseModel& model, int k);

}  // namespace viewprep
