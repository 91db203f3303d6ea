#pragma once

#include <Eigen/Core>

#include "viewprep/sparse_model.hpp"

namespace viewprep {

struct Projection {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double depth = 0;     // z in the camera frame
  bool behind = false;  // depth <= 0; pixel is undefined in that case
};

// Projects a world point through pose and camera model (with distortion).
// Throws std::invalid_argument on non-finite input.
Projection project(const CameraIntrinsics& camera, const Pose& pose,
                   const Eigen::Vector3d& xyz_world);

// Inverse of project for depth > 0. Distorted models are inverted by Newton
// iteration; throws std::runtime_error if it fails to converge.
Eigen::Vector3d unproject(const CameraIntrinsics& camera, const Pose& pose,
                          const Eigen::Vector2d& pixel, double depth);

// Applies the model's distortion to normalized camera coordinates (x/z, y/z).
Eigen::Vector2d distort(const CameraIntrinsics& camera,
                        const Eigen::Vector2d& normalized);

// Inverse of distort. max_iterations Newton steps, tolerance on the residual.
Eigen::Vector2d undistort(const CameraIntrinsics& camera,
                          const Eigen::Vector2d& distorted,
                          int max_iterations = 50, double tolerance = 1e-12);

}  // namespace viewprep
