#include "viewprep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewprep {

RelativePose relative_pose(const Pose& ref, const Pose& tgt) {
  RelativePose rel;
  rel.rotation = tgt.rotation * ref.rotation.conjugate();
  rel.translation = tgt.translation - rel.rotation * ref.translation;
  return rel;
}

double depth_quantile_scale(std::span<const double> depths, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("quantile q must be in (0, 1)");
  }
  if (depths.empty()) {
    throw std::invalid_argument("quantile of an empty depth set");
  }
  std::vector<double> sorted(depths.begin(), depths.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const size_t rank = static_cast<size_t>(
      std::ceil(q * static_cast<double>(n)));
  const size_t idx = std::min(n - 1, rank == 0 ? 0 : rank - 1);
  return sorted[idx];
}

double depth_quantile_scale(const DepthMap& depth, double q) {
  std::vector<double> values;
  values.reserve(depth.values.size());
  for (size_t i = 0; i < depth.values.size(); ++i) {
    if (depth.valid[i]) values.push_back(depth.values[i]);
  }
  if (values.empty()) {
    throw std::invalid_argument("depth map has no valid pixels");
  }
  return depth_quantile_scale(std::span<const double>(values), q);
}

ConditioningVector build_conditioning(const RelativePose& rel,
                                      double fov_vertical, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("conditioning scale must be positive");
  }
  if (!(fov_vertical > 0.0 && fov_vertical < M_PI)) {
    throw std::invalid_argument("vertical fov must be in (0, pi)");
  }
  const Eigen::Matrix3d r = rel.rotation.toRotationMatrix();
  const Eigen::Vector3d t = rel.translation / scale;
  ConditioningVector v;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) v[row * 4 + col] = r(row, col);
    v[row * 4 + 3] = t(row);
  }
  v[12] = fov_vertical;
  return v;
}

GravityAlignment gravity_align(const SparseModel& model) {
  if (model.images.empty()) {
    throw std::invalid_argument("gravity_align: no registered images");
  }

  Eigen::Vector3d mean_down = Eigen::Vector3d::Zero();
  for (const auto& [id, image] : model.images) {
    (void)id;
    // Camera +y expressed in world coordinates.
    mean_down += image.pose.rotation.conjugate() * Eigen::Vector3d::UnitY();
  }
  mean_down /= static_cast<double>(model.images.size());
  if (mean_down.norm() < 1e-9) {
    throw std::runtime_error("gravity_align: degenerate mean down-axis");
  }
  const Eigen::Vector3d down = mean_down.normalized();
  const Eigen::Vector3d target(0.0, 0.0, -1.0);

  // Minimal rotation taking `down` onto `target`.
  Eigen::Quaterniond g = Eigen::Quaterniond::FromTwoVectors(down, target);

  GravityAlignment out;
  out.transform.rotation = g;
  out.transform.translation.setZero();
  out.model = model;
  for (auto& [id, image] : out.model.images) {
    (void)id;
    image.pose.rotation = image.pose.rotation * g.conjugate();
    image.pose.rotation.normalize();
  }
  for (auto& [id, point] : out.model.points) {
    (void)id;
    point.xyz = g * point.xyz;
  }
  return out;
}

std::vector<int32_t> sample_orbit_references(const SparseModel& model, int k) {
  const int n = static_cast<int>(model.images.size());
  if (n == 0) throw std::invalid_argument("sample_orbit_references: empty model");
  if (k <= 0 || k > n) {
    throw std::invalid_argument("sample_orbit_references: k out of range");
  }

  std::vector<std::pair<double, int32_t>> by_angle;
  by_angle.reserve(n);
  for (const auto& [id, image] : model.images) {
    const Eigen::Vector3d dir =
        image.pose.rotation.conjugate() * Eigen::Vector3d::UnitZ();
    by_angle.emplace_back(std::atan2(dir.y(), dir.x()), id);
  }
  std::sort(by_angle.begin(), by_angle.end());

  std::vector<int32_t> selected;
  selected.reserve(k);
  for (int i = 0; i < k; ++i) {
    selected.push_back(by_angle[size_t(i) * n / k].second);
  }
  return selected;
}

}  // namespace viewprep
