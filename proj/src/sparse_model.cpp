#include "viewprep/sparse_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace viewprep {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

bool finite3(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

void validate_pose(const Pose& pose, const std::string& where) {
  const auto& q = pose.rotation;
  if (!std::isfinite(q.w()) || !std::isfinite(q.x()) || !std::isfinite(q.y()) ||
      !std::isfinite(q.z()) || !finite3(pose.translation)) {
    fail("non-finite pose for " + where);
  }
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    fail("quaternion not unit-norm for " + where);
  }
}

void validate_camera(const CameraIntrinsics& cam) {
  const std::string where = "camera " + std::to_string(cam.camera_id);
  if (cam.width == 0 || cam.height == 0) fail("zero dimension for " + where);
  if (static_cast<int>(cam.params.size()) != camera_model_num_params(cam.model)) {
    fail("wrong param count for " + where + ": got " +
         std::to_string(cam.params.size()));
  }
  for (double p : cam.params) {
    if (!std::isfinite(p)) fail("non-finite param for " + where);
  }
  if (cam.focal_x() <= 0 || cam.focal_y() <= 0) {
    fail("non-positive focal length for " + where);
  }
}

}  // namespace

int camera_model_num_params(CameraModel model) {
  switch (model) {
    case CameraModel::kSimplePinhole: return 3;
    case CameraModel::kPinhole: return 4;
    case CameraModel::kSimpleRadial: return 4;
    case CameraModel::kRadial: return 5;
    case CameraModel::kOpenCv: return 8;
  }
  fail("unknown camera model");
}

const char* camera_model_name(CameraModel model) {
  switch (model) {
    case CameraModel::kSimplePinhole: return "SIMPLE_PINHOLE";
    case CameraModel::kPinhole: return "PINHOLE";
    case CameraModel::kSimpleRadial: return "SIMPLE_RADIAL";
    case CameraModel::kRadial: return "RADIAL";
    case CameraModel::kOpenCv: return "OPENCV";
  }
  fail("unknown camera model");
}

std::optional<CameraModel> camera_model_from_name(const std::string& name) {
  for (int id = 0; id <= 4; ++id) {
    const auto model = static_cast<CameraModel>(id);
    if (name == camera_model_name(model)) return model;
  }
  return std::nullopt;
}

std::optional<CameraModel> camera_model_from_id(int32_t id) {
  if (id < 0 || id > 4) return std::nullopt;
  return static_cast<CameraModel>(id);
}

double CameraIntrinsics::focal_x() const { return params.at(0); }

double CameraIntrinsics::focal_y() const {
  switch (model) {
    case CameraModel::kPinhole:
    case CameraModel::kOpenCv:
      return params.at(1);
    default:
      return params.at(0);
  }
}

double CameraIntrinsics::principal_x() const {
  switch (model) {
    case CameraModel::kPinhole:
    case CameraModel::kOpenCv:
      return params.at(2);
    default:
      return params.at(1);
  }
}

double CameraIntrinsics::principal_y() const {
  switch (model) {
    case CameraModel::kPinhole:
    case CameraModel::kOpenCv:
      return params.at(3);
    default:
      return params.at(2);
  }
}

double CameraIntrinsics::vertical_fov() const {
  return 2.0 * std::atan(static_cast<double>(height) / (2.0 * focal_y()));
}

void SparseModel::validate() const {
  for (const auto& [id, cam] : cameras) {
    if (id != cam.camera_id) fail("camera map key mismatch");
    validate_camera(cam);
  }

  std::set<std::string> names;
  for (const auto& [id, image] : images) {
    const std::string where = "image " + std::to_string(id);
    if (id != image.image_id) fail("image map key mismatch");
    if (!names.insert(image.name).second) {
      fail("duplicate image name '" + image.name + "'");
    }
    if (!cameras.count(image.camera_id)) {
      fail(where + " references missing camera " +
           std::to_string(image.camera_id));
    }
    validate_pose(image.pose, where);
    for (size_t i = 0; i < image.points2d.size(); ++i) {
      const Observation& obs = image.points2d[i];
      if (!std::isfinite(obs.x) || !std::isfinite(obs.y)) {
        fail("non-finite observation in " + where);
      }
      if (obs.point3d_id == kInvalidPoint3dId) continue;
      auto it = points.find(obs.point3d_id);
      if (it == points.end()) {
        fail(where + " observation " + std::to_string(i) +
             " references missing point " + std::to_string(obs.point3d_id));
      }
      const auto& track = it->second.track;
      const bool listed =
          std::any_of(track.begin(), track.end(), [&](const TrackElement& t) {
            return t.image_id == id && t.point2d_idx == static_cast<int32_t>(i);
          });
      if (!listed) {
        fail("point " + std::to_string(obs.point3d_id) +
             " track misses observation (" + std::to_string(id) + ", " +
             std::to_string(i) + ")");
      }
    }
  }

  for (const auto& [id, point] : points) {
    const std::string where = "point " + std::to_string(id);
    if (id != point.point3d_id) fail("point map key mismatch");
    if (!finite3(point.xyz) || !std::isfinite(point.error)) {
      fail("non-finite fields in " + where);
    }
    if (point.track.empty()) fail(where + " has an empty track");
    for (const TrackElement& t : point.track) {
      auto it = images.find(t.image_id);
      if (it == images.end()) {
        fail(where + " track references missing image " +
             std::to_string(t.image_id));
      }
      const auto& obs = it->second.points2d;
      if (t.point2d_idx < 0 ||
          static_cast<size_t>(t.point2d_idx) >= obs.size()) {
        fail(where + " track index " + std::to_string(t.point2d_idx) +
             " out of range for image " + std::to_string(t.image_id));
      }
      if (obs[t.point2d_idx].point3d_id != id) {
        fail(where + " track element (" + std::to_string(t.image_id) + ", " +
             std::to_string(t.point2d_idx) + ") does not point back");
      }
    }
  }
}

LenientReport SparseModel::repair() {
  LenientReport report;

  for (auto& [id, image] : images) {
    (void)id;
    for (Observation& obs : image.points2d) {
      if (obs.point3d_id != kInvalidPoint3dId && !points.count(obs.point3d_id)) {
        obs.point3d_id = kInvalidPoint3dId;
        ++report.dropped_observations;
      }
    }
  }

  // Tracks are rebuilt from the image side, which is authoritative.
  for (auto& [pid, point] : points) {
    point.track.clear();
    (void)pid;
  }
  for (const auto& [iid, image] : images) {
    for (size_t i = 0; i < image.points2d.size(); ++i) {
      const int64_t pid = image.points2d[i].point3d_id;
      if (pid == kInvalidPoint3dId) continue;
      points.at(pid).track.push_back({iid, static_cast<int32_t>(i)});
    }
  }
  report.rebuilt_tracks = points.size();

  for (auto it = points.begin(); it != points.end();) {
    if (it->second.track.empty()) {
      it = points.erase(it);
      ++report.dropped_points;
    } else {
      ++it;
    }
  }

  validate();
  return report;
}

KeypointSet mask_border_keypoints(const KeypointSet& kps, double border_fraction) {
  if (!(border_fraction >= 0.0 && border_fraction < 0.5)) {
    throw std::invalid_argument("border_fraction must be in [0, 0.5)");
  }
  const double w = static_cast<double>(kps.width);
  const double h = static_cast<double>(kps.height);
  const double band = border_fraction * std::hypot(w, h);

  KeypointSet out;
  out.width = kps.width;
  out.height = kps.height;
  for (const auto& kp : kps.keypoints) {
    const double edge_dist =
        std::min({kp.x(), kp.y(), w - 1.0 - kp.x(), h - 1.0 - kp.y()});
    if (!(edge_dist < band)) out.keypoints.push_back(kp);
  }
  return out;
}

bool watermark_trigger(const std::vector<std::pair<int64_t, bool>>& pair_labels,
                       double threshold) {
  if (pair_labels.empty()) {
    throw std::invalid_argument("watermark_trigger: empty pair list");
  }
  size_t watermark = 0;
  for (const auto& [id, is_watermark] : pair_labels) {
    (void)id;
    if (is_watermark) ++watermark;
  }
  return static_cast<double>(watermark) / static_cast<double>(pair_labels.size()) >=
         threshold;
}

}  // namespace viewprep
