#include "viewprep/camera.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace viewprep {

namespace {

Eigen::Vector2d distortion_delta(const CameraIntrinsics& camera, double u,
                                 double v) {
  const double u2 = u * u;
  const double v2 = v * v;
  const double r2 = u2 + v2;
  switch (camera.model) {
    case CameraModel::kSimplePinhole:
    case CameraModel::kPinhole:
      return {0.0, 0.0};
    case CameraModel::kSimpleRadial: {
      const double radial = camera.params[3] * r2;
      return {u * radial, v * radial};
    }
    case CameraModel::kRadial: {
      const double radial = camera.params[3] * r2 + camera.params[4] * r2 * r2;
      return {u * radial, v * radial};
    }
    case CameraModel::kOpenCv: {
      const double k1 = camera.params[4];
      const double k2 = camera.params[5];
      const double p1 = camera.params[6];
      const double p2 = camera.params[7];
      const double radial = k1 * r2 + k2 * r2 * r2;
      const double uv = u * v;
      return {u * radial + 2.0 * p1 * uv + p2 * (r2 + 2.0 * u2),
              v * radial + 2.0 * p2 * uv + p1 * (r2 + 2.0 * v2)};
    }
  }
  throw std::logic_error("unreachable camera model");
}

}  // namespace

Eigen::Vector2d distort(const CameraIntrinsics& camera,
                        const Eigen::Vector2d& normalized) {
  return normalized + distortion_delta(camera, normalized.x(), normalized.y());
}

Eigen::Vector2d undistort(const CameraIntrinsics& camera,
                          const Eigen::Vector2d& distorted, int max_iterations,
                          double tolerance) {
  if (camera.model == CameraModel::kSimplePinhole ||
      camera.model == CameraModel::kPinhole) {
    return distorted;
  }

  // Newton with a numeric Jacobian; the distortion is smooth and near
  // identity for realistic coefficients.
  Eigen::Vector2d x = distorted;
  const double h = 1e-7;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::Vector2d f = distort(camera, x) - distorted;
    if (f.lpNorm<Eigen::Infinity>() < tolerance) return x;
    Eigen::Matrix2d jac;
    jac.col(0) = (distort(camera, {x.x() + h, x.y()}) -
                  distort(camera, {x.x() - h, x.y()})) /
                 (2.0 * h);
    jac.col(1) = (distort(camera, {x.x(), x.y() + h}) -
                  distort(camera, {x.x(), x.y() - h})) /
                 (2.0 * h);
    const Eigen::Vector2d step = jac.partialPivLu().solve(f);
    if (!step.allFinite()) break;
    x -= step;
  }
  if ((distort(camera, x) - distorted).lpNorm<Eigen::Infinity>() < tolerance) {
    return x;
  }
  throw std::runtime_error("undistortion did not converge");
}

Projection project(const CameraIntrinsics& camera, const Pose& pose,
                   const Eigen::Vector3d& xyz_world) {
  if (!xyz_world.allFinite()) {
    throw std::invalid_argument("project: non-finite world point");
  }
  const Eigen::Vector3d cam = pose.apply(xyz_world);

  Projection result;
  result.depth = cam.z();
  if (cam.z() <= 0.0) {
    result.behind = true;
    return result;
  }
  const Eigen::Vector2d normalized(cam.x() / cam.z(), cam.y() / cam.z());
  const Eigen::Vector2d d = distort(camera, normalized);
  result.pixel.x() = camera.focal_x() * d.x() + camera.principal_x();
  result.pixel.y() = camera.focal_y() * d.y() + camera.principal_y();
  return result;
}

Eigen::Vector3d unproject(const CameraIntrinsics& camera, const Pose& pose,
                          const Eigen::Vector2d& pixel, double depth) {
  if (!(depth > 0.0)) {
    throw std::invalid_argument("unproject: depth must be positive");
  }
  const Eigen::Vector2d distorted(
      (pixel.x() - camera.principal_x()) / camera.focal_x(),
      (pixel.y() - camera.principal_y()) / camera.focal_y());
  const Eigen::Vector2d n = undistort(camera, distorted);
  const Eigen::Vector3d cam(n.x() * depth, n.y() * depth, depth);
  return pose.rotation.conjugate() * (cam - pose.translation);
}

}  // namespace viewprep
