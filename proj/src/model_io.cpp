#include "viewprep/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace viewprep {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// All binary IO is little-endian; this codebase targets little-endian hosts.
static_assert(std::endian::native == std::endian::little,
              "binary model IO assumes a little-endian host");

template <typename T>
T read_le(std::istream& in, const std::string& what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail("truncated stream while reading " + what);
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const fs::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail("missing file: " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail("unwritable path: " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Binary format
// ---------------------------------------------------------------------------

void read_cameras_binary(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, true);
  const uint64_t count = read_le<uint64_t>(in, "camera count");
  for (uint64_t i = 0; i < count; ++i) {
    CameraIntrinsics cam;
    cam.camera_id = read_le<int32_t>(in, "camera id");
    const int32_t model_id = read_le<int32_t>(in, "camera model id");
    const auto cam_model = camera_model_from_id(model_id);
    if (!cam_model) {
      fail("unknown camera model id " + std::to_string(model_id) +
           " for camera " + std::to_string(cam.camera_id));
    }
    cam.model = *cam_model;
    cam.width = read_le<uint64_t>(in, "camera width");
    cam.height = read_le<uint64_t>(in, "camera height");
    const int n = camera_model_num_params(cam.model);
    cam.params.resize(n);
    for (int p = 0; p < n; ++p) cam.params[p] = read_le<double>(in, "camera param");
    model.cameras.emplace(cam.camera_id, std::move(cam));
  }
}

void read_images_binary(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, true);
  const uint64_t count = read_le<uint64_t>(in, "image count");
  for (uint64_t i = 0; i < count; ++i) {
    RegisteredImage image;
    image.image_id = read_le<int32_t>(in, "image id");
    const double qw = read_le<double>(in, "qw");
    const double qx = read_le<double>(in, "qx");
    const double qy = read_le<double>(in, "qy");
    const double qz = read_le<double>(in, "qz");
    image.pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
    image.pose.translation.x() = read_le<double>(in, "tx");
    image.pose.translation.y() = read_le<double>(in, "ty");
    image.pose.translation.z() = read_le<double>(in, "tz");
    image.camera_id = read_le<int32_t>(in, "image camera id");
    char c;
    while (true) {
      in.read(&c, 1);
      if (!in) fail("truncated stream while reading image name");
      if (c == '\0') break;
      image.name.push_back(c);
    }
    const uint64_t n_pts = read_le<uint64_t>(in, "points2d count");
    image.points2d.resize(n_pts);
    for (uint64_t p = 0; p < n_pts; ++p) {
      image.points2d[p].x = read_le<double>(in, "point2d x");
      image.points2d[p].y = read_le<double>(in, "point2d y");
      image.points2d[p].point3d_id = read_le<int64_t>(in, "point3d id");
    }
    model.images.emplace(image.image_id, std::move(image));
  }
}

void read_points_binary(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, true);
  const uint64_t count = read_le<uint64_t>(in, "point count");
  for (uint64_t i = 0; i < count; ++i) {
    Point3D point;
    point.point3d_id = static_cast<int64_t>(read_le<uint64_t>(in, "point id"));
    point.xyz.x() = read_le<double>(in, "point x");
    point.xyz.y() = read_le<double>(in, "point y");
    point.xyz.z() = read_le<double>(in, "point z");
    point.rgb[0] = read_le<uint8_t>(in, "point r");
    point.rgb[1] = read_le<uint8_t>(in, "point g");
    point.rgb[2] = read_le<uint8_t>(in, "point b");
    point.error = read_le<double>(in, "point error");
    const uint64_t track_len = read_le<uint64_t>(in, "track length");
    point.track.resize(track_len);
    for (uint64_t t = 0; t < track_len; ++t) {
      point.track[t].image_id = read_le<int32_t>(in, "track image id");
      point.track[t].point2d_idx = read_le<int32_t>(in, "track point2d idx");
    }
    model.points.emplace(point.point3d_id, std::move(point));
  }
}

void write_cameras_binary(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, true);
  write_le<uint64_t>(out, model.cameras.size());
  for (const auto& [id, cam] : model.cameras) {
    write_le<int32_t>(out, id);
    write_le<int32_t>(out, static_cast<int32_t>(cam.model));
    write_le<uint64_t>(out, cam.width);
    write_le<uint64_t>(out, cam.height);
    for (double p : cam.params) write_le<double>(out, p);
  }
}

void write_images_binary(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, true);
  write_le<uint64_t>(out, model.images.size());
  for (const auto& [id, image] : model.images) {
    write_le<int32_t>(out, id);
    const auto& q = image.pose.rotation;
    write_le<double>(out, q.w());
    write_le<double>(out, q.x());
    write_le<double>(out, q.y());
    write_le<double>(out, q.z());
    write_le<double>(out, image.pose.translation.x());
    write_le<double>(out, image.pose.translation.y());
    write_le<double>(out, image.pose.translation.z());
    write_le<int32_t>(out, image.camera_id);
    out.write(image.name.c_str(), static_cast<std::streamsize>(image.name.size() + 1));
    write_le<uint64_t>(out, image.points2d.size());
    for (const Observation& obs : image.points2d) {
      write_le<double>(out, obs.x);
      write_le<double>(out, obs.y);
      write_le<int64_t>(out, obs.point3d_id);
    }
  }
}

void write_points_binary(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, true);
  write_le<uint64_t>(out, model.points.size());
  for (const auto& [id, point] : model.points) {
    write_le<uint64_t>(out, static_cast<uint64_t>(id));
    write_le<double>(out, point.xyz.x());
    write_le<double>(out, point.xyz.y());
    write_le<double>(out, point.xyz.z());
    write_le<uint8_t>(out, point.rgb[0]);
    write_le<uint8_t>(out, point.rgb[1]);
    write_le<uint8_t>(out, point.rgb[2]);
    write_le<double>(out, point.error);
    write_le<uint64_t>(out, point.track.size());
    for (const TrackElement& t : point.track) {
      write_le<int32_t>(out, t.image_id);
      write_le<int32_t>(out, t.point2d_idx);
    }
  }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

// Yields non-comment, non-empty lines.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    size_t start = line.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t\r\n");
    line = line.substr(start, end - start + 1);
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

void read_cameras_text(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, false);
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream ls(line);
    CameraIntrinsics cam;
    std::string model_name;
    if (!(ls >> cam.camera_id >> model_name >> cam.width >> cam.height)) {
      fail("malformed camera line: " + line);
    }
    const auto cam_model = camera_model_from_name(model_name);
    if (!cam_model) fail("unknown camera model '" + model_name + "'");
    cam.model = *cam_model;
    double p;
    while (ls >> p) cam.params.push_back(p);
    model.cameras.emplace(cam.camera_id, std::move(cam));
  }
}

void read_images_text(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, false);
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream ls(line);
    RegisteredImage image;
    double qw, qx, qy, qz;
    if (!(ls >> image.image_id >> qw >> qx >> qy >> qz >>
          image.pose.translation.x() >> image.pose.translation.y() >>
          image.pose.translation.z() >> image.camera_id >> image.name)) {
      fail("malformed image line: " + line);
    }
    image.pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz);

    // Observations live on the following line (possibly empty).
    std::string obs_line;
    if (!std::getline(in, obs_line)) fail("missing observation line for image " +
                                          std::to_string(image.image_id));
    std::istringstream os(obs_line);
    Observation obs;
    while (os >> obs.x >> obs.y >> obs.point3d_id) {
      image.points2d.push_back(obs);
    }
    model.images.emplace(image.image_id, std::move(image));
  }
}

void read_points_text(SparseModel& model, const fs::path& path) {
  auto in = open_input(path, false);
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream ls(line);
    Point3D point;
    int r, g, b;
    if (!(ls >> point.point3d_id >> point.xyz.x() >> point.xyz.y() >>
          point.xyz.z() >> r >> g >> b >> point.error)) {
      fail("malformed point line: " + line);
    }
    point.rgb = {static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                 static_cast<uint8_t>(b)};
    TrackElement t;
    while (ls >> t.image_id >> t.point2d_idx) point.track.push_back(t);
    model.points.emplace(point.point3d_id, std::move(point));
  }
}

void write_cameras_text(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, false);
  out << "# Camera list: CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n";
  for (const auto& [id, cam] : model.cameras) {
    out << id << ' ' << camera_model_name(cam.model) << ' ' << cam.width << ' '
        << cam.height;
    for (double p : cam.params) out << ' ' << format_double(p);
    out << '\n';
  }
}

void write_images_text(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, false);
  out << "# Image list: IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n"
      << "#             POINTS2D[] as (X Y POINT3D_ID)\n";
  for (const auto& [id, image] : model.images) {
    const auto& q = image.pose.rotation;
    const auto& t = image.pose.translation;
    out << id << ' ' << format_double(q.w()) << ' ' << format_double(q.x())
        << ' ' << format_double(q.y()) << ' ' << format_double(q.z()) << ' '
        << format_double(t.x()) << ' ' << format_double(t.y()) << ' '
        << format_double(t.z()) << ' ' << image.camera_id << ' ' << image.name
        << '\n';
    bool first = true;
    for (const Observation& obs : image.points2d) {
      if (!first) out << ' ';
      first = false;
      out << format_double(obs.x) << ' ' << format_double(obs.y) << ' '
          << obs.point3d_id;
    }
    out << '\n';
  }
}

void write_points_text(const SparseModel& model, const fs::path& path) {
  auto out = open_output(path, false);
  out << "# 3D point list: POINT3D_ID X Y Z R G B ERROR TRACK[] as "
         "(IMAGE_ID POINT2D_IDX)\n";
  for (const auto& [id, point] : model.points) {
    out << id << ' ' << format_double(point.xyz.x()) << ' '
        << format_double(point.xyz.y()) << ' ' << format_double(point.xyz.z())
        << ' ' << int(point.rgb[0]) << ' ' << int(point.rgb[1]) << ' '
        << int(point.rgb[2]) << ' ' << format_double(point.error);
    for (const TrackElement& t : point.track) {
      out << ' ' << t.image_id << ' ' << t.point2d_idx;
    }
    out << '\n';
  }
}

ModelFormat detect_format(const fs::path& dir) {
  const bool binary = fs::exists(dir / "cameras.bin") &&
                      fs::exists(dir / "images.bin") &&
                      fs::exists(dir / "points3D.bin");
  const bool text = fs::exists(dir / "cameras.txt") &&
                    fs::exists(dir / "images.txt") &&
                    fs::exists(dir / "points3D.txt");
  if (binary) return ModelFormat::kBinary;
  if (text) return ModelFormat::kText;
  fail("no complete model file set (cameras/images/points3D) in " +
       dir.string());
}

}  // namespace

SparseModel parse_model(const fs::path& dir, ModelFormat format,
                        const ParseOptions& options) {
  if (format == ModelFormat::kAuto) format = detect_format(dir);

  SparseModel model;
  if (format == ModelFormat::kBinary) {
    read_cameras_binary(model, dir / "cameras.bin");
    read_images_binary(model, dir / "images.bin");
    read_points_binary(model, dir / "points3D.bin");
  } else {
    read_cameras_text(model, dir / "cameras.txt");
    read_images_text(model, dir / "images.txt");
    read_points_text(model, dir / "points3D.txt");
  }

  if (options.lenient) {
    model.repair();
  } else {
    model.validate();
  }
  return model;
}

void write_model(const SparseModel& model, const fs::path& dir,
                 ModelFormat format) {
  if (format == ModelFormat::kAuto) {
    throw std::invalid_argument("write_model requires an explicit format");
  }
  fs::create_directories(dir);
  if (format == ModelFormat::kBinary) {
    write_cameras_binary(model, dir / "cameras.bin");
    write_images_binary(model, dir / "images.bin");
    write_points_binary(model, dir / "points3D.bin");
  } else {
    write_cameras_text(model, dir / "cameras.txt");
    write_images_text(model, dir / "images.txt");
    write_points_text(model, dir / "points3D.txt");
  }
}

KeypointSet read_keypoints(const fs::path& path) {
  auto in = open_input(path, false);
  KeypointSet kps;
  size_t n = 0;
  if (!(in >> kps.width >> kps.height >> n)) {
    fail("malformed keypoint header in " + path.string());
  }
  kps.keypoints.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(in >> kps.keypoints[i].x() >> kps.keypoints[i].y())) {
      fail("truncated keypoint file " + path.string());
    }
  }
  return kps;
}

void write_keypoints(const KeypointSet& kps, const fs::path& path) {
  auto out = open_output(path, false);
  out << kps.width << ' ' << kps.height << ' ' << kps.keypoints.size() << '\n';
  for (const auto& kp : kps.keypoints) {
    out << format_double(kp.x()) << ' ' << format_double(kp.y()) << '\n';
  }
}

}  // namespace viewprep
