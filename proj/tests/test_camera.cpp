#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "testutil.hpp"
#include "viewprep/camera.hpp"

using namespace viewprep;

namespace {

CameraIntrinsics pinhole_128() {
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kPinhole;
  cam.width = 256;
  cam.height = 256;
  cam.params = {100, 100, 128, 128};
  return cam;
}

}  // namespace

TEST_CASE("pinhole projection on the optical axis") {
  const auto cam = pinhole_128();
  const Projection p = project(cam, Pose{}, {0, 0, 1});
  CHECK_FALSE(p.behind);
  CHECK(p.depth == doctest::Approx(1.0));
  CHECK(p.pixel.x() == doctest::Approx(128.0));
  CHECK(p.pixel.y() == doctest::Approx(128.0));
}

TEST_CASE("pinhole projection off axis") {
  const auto cam = pinhole_128();
  const Projection p = project(cam, Pose{}, {1, 0, 2});
  CHECK(p.depth == doctest::Approx(2.0));
  CHECK(p.pixel.x() == doctest::Approx(178.0));
  CHECK(p.pixel.y() == doctest::Approx(128.0));
}

TEST_CASE("behind-camera points are flagged, not thrown") {
  const auto cam = pinhole_128();
  CHECK(project(cam, Pose{}, {0, 0, -1}).behind);
  CHECK(project(cam, Pose{}, {0, 0, 0}).behind);
}

TEST_CASE("non-finite input throws") {
  const auto cam = pinhole_128();
  CHECK_THROWS_AS(
      project(cam, Pose{}, {std::numeric_limits<double>::quiet_NaN(), 0, 1}),
      std::invalid_argument);
}

TEST_CASE("simple radial distortion matches the independent formula") {
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kSimpleRadial;
  cam.width = 640;
  cam.height = 480;
  cam.params = {400, 320, 240, 0.1};

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(-0.4, 0.4);
  for (int i = 0; i < 200; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    const double z = 1.0 + std::abs(coord(rng));
    const Projection p = project(cam, Pose{}, {x, y, z});

    // Step-by-step reference: normalize, radial term, focal, principal.
    const double u = x / z;
    const double v = y / z;
    const double r2 = u * u + v * v;
    const double expected_x = 400 * (u * (1 + 0.1 * r2)) + 320;
    const double expected_y = 400 * (v * (1 + 0.1 * r2)) + 240;
    CHECK(p.pixel.x() == doctest::Approx(expected_x).epsilon(1e-12));
    CHECK(p.pixel.y() == doctest::Approx(expected_y).epsilon(1e-12));
  }
}

TEST_CASE("opencv distortion matches the independent formula") {
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kOpenCv;
  cam.width = 640;
  cam.height = 480;
  cam.params = {400, 410, 320, 240, 0.05, -0.01, 0.002, -0.001};

  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> coord(-0.4, 0.4);
  for (int i = 0; i < 200; ++i) {
    const double u = coord(rng);
    const double v = coord(rng);
    const Projection p = project(cam, Pose{}, {u, v, 1.0});

    const double r2 = u * u + v * v;
    const double radial = 0.05 * r2 + -0.01 * r2 * r2;
    const double du = u * radial + 2 * 0.002 * u * v + -0.001 * (r2 + 2 * u * u);
    const double dv = v * radial + 0.002 * (r2 + 2 * v * v) + 2 * -0.001 * u * v;
    CHECK(p.pixel.x() == doctest::Approx(400 * (u + du) + 320).epsilon(1e-12));
    CHECK(p.pixel.y() == doctest::Approx(410 * (v + dv) + 240).epsilon(1e-12));
  }
}

TEST_CASE("unproject inverts project on the optical axis") {
  const auto cam = pinhole_128();
  const Eigen::Vector3d world = unproject(cam, Pose{}, {128, 128}, 1.0);
  CHECK(world.x() == doctest::Approx(0.0));
  CHECK(world.y() == doctest::Approx(0.0));
  CHECK(world.z() == doctest::Approx(1.0));
}

TEST_CASE("project/unproject round-trip for every camera model") {
  std::mt19937_64 rng(23);
  for (int model_id = 0; model_id <= 4; ++model_id) {
    CameraIntrinsics cam = testutil::random_camera(rng, 1);
    while (int(cam.model) != model_id) cam = testutil::random_camera(rng, 1);

    Pose pose;
    pose.rotation = testutil::random_unit_quaternion(rng);
    pose.translation = {0.3, -0.2, 0.5};

    std::uniform_real_distribution<double> px(0.1 * cam.width, 0.9 * cam.width);
    std::uniform_real_distribution<double> py(0.1 * cam.height, 0.9 * cam.height);
    std::uniform_real_distribution<double> pd(0.5, 20.0);
    double max_pixel_err = 0;
    double max_depth_err = 0;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector2d pixel(px(rng), py(rng));
      const double depth = pd(rng);
      const Eigen::Vector3d world = unproject(cam, pose, pixel, depth);
      const Projection p = project(cam, pose, world);
      REQUIRE_FALSE(p.behind);
      max_pixel_err = std::max(max_pixel_err, (p.pixel - pixel).norm());
      max_depth_err = std::max(max_depth_err, std::abs(p.depth - depth));
    }
    CHECK(max_pixel_err < 1e-6);
    CHECK(max_depth_err < 1e-9);
  }
}

TEST_CASE("unproject rejects non-positive depth") {
  const auto cam = pinhole_128();
  CHECK_THROWS_AS(unproject(cam, Pose{}, {128, 128}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(unproject(cam, Pose{}, {128, 128}, -1.0), std::invalid_argument);
}

TEST_CASE("vertical fov uses fy") {
  const auto cam = pinhole_128();
  CHECK(cam.vertical_fov() ==
        doctest::Approx(2 * std::atan(256.0 / (2 * 100.0))));
}
