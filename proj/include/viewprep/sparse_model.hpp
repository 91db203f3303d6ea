#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace viewprep {

// Sentinel for a 2D observation without a triangulated point.
inline constexpr int64_t kInvalidPoint3dId = -1;

enum class CameraModel : int32_t {
  kSimplePinhole = 0,  // f, cx, cy
  kPinhole = 1,        // fx, fy, cx, cy
  kSimpleRadial = 2,   // f, cx, cy, k
  kRadial = 3,         // f, cx, cy, k1, k2
  kOpenCv = 4,         // fx, fy, cx, cy, k1, k2, p1, p2
};

int camera_model_num_params(CameraModel model);
const char* camera_model_name(CameraModel model);
std::optional<CameraModel> camera_model_from_name(const std::string& name);
std::optional<CameraModel> camera_model_from_id(int32_t id);

struct CameraIntrinsics {
  int32_t camera_id = -1;
  CameraModel model = CameraModel::kSimplePinhole;
  uint64_t width = 0;
  uint64_t height = 0;
  std::vector<double> params;

  double focal_x() const;
  double focal_y() const;
  double principal_x() const;
  double principal_y() const;
  // 2*atan(height / (2*fy)), in radians.
  double vertical_fov() const;

  bool operator==(const CameraIntrinsics& other) const = default;
};

// World-to-camera rigid transform: x_cam = rotation * x_world + translation.
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& world) const {
    return rotation * world + translation;
  }
  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.conjugate();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  bool operator==(const Pose& other) const {
    return rotation.coeffs() == other.rotation.coeffs() &&
           translation == other.translation;
  }
};

struct Observation {
  double x = 0;
  double y = 0;
  int64_t point3d_id = kInvalidPoint3dId;

  bool operator==(const Observation& other) const = default;
};

struct RegisteredImage {
  int32_t image_id = -1;
  std::string name;
  int32_t camera_id = -1;
  Pose pose;
  std::vector<Observation> points2d;

  bool operator==(const RegisteredImage& other) const = default;
};

struct TrackElement {
  int32_t image_id = -1;
  int32_t point2d_idx = -1;

  bool operator==(const TrackElement& other) const = default;
};

struct Point3D {
  int64_t point3d_id = -1;
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  std::array<uint8_t, 3> rgb = {0, 0, 0};
  double error = 0;
  std::vector<TrackElement> track;

  bool operator==(const Point3D& other) const {
    return point3d_id == other.point3d_id && xyz == other.xyz &&
           rgb == other.rgb && error == other.error && track == other.track;
  }
};

// Counters reported by lenient validation repairs.
struct LenientReport {
  size_t dropped_observations = 0;
  size_t rebuilt_tracks = 0;
  size_t dropped_points = 0;
};

struct SparseModel {
  std::map<int32_t, CameraIntrinsics> cameras;
  std::map<int32_t, RegisteredImage> images;
  std::map<int64_t, Point3D> points;

  // Throws std::runtime_error with offending ids on the first violated
  // invariant: camera refs, point refs, reciprocal track consistency,
  // unique image names, per-type field invariants.
  void validate() const;

  // Drops dangling observations and rebuilds tracks from the image side so
  // that reciprocal consistency holds by construction. Duplicate image
  // names remain a hard error.
  LenientReport repair();

  bool operator==(const SparseModel& other) const = default;
};

struct KeypointSet {
  uint64_t width = 0;
  uint64_t height = 0;
  std::vector<Eigen::Vector2d> keypoints;
};

// Removes every keypoint closer than border_fraction * image diagonal to the
// nearest image edge (strict '<' on the min of the four edge distances,
// measured from keypoint centers). Survivor order is preserved.
// Requires 0 <= border_fraction < 0.5.
KeypointSet mask_border_keypoints(const KeypointSet& kps, double border_fraction);

// True iff at least `threshold` of the labeled pairs are watermark pairs.
// Boundary inclusive: exactly 10% returns true at the default threshold.
bool watermark_trigger(const std::vector<std::pair<int64_t, bool>>& pair_labels,
                       double threshold = 0.10);

}  // namespace viewprep
