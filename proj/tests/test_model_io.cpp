#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "testutil.hpp"
#include "viewprep/model_io.hpp"

using namespace viewprep;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

TEST_CASE("empty model round-trips in both formats") {
  testutil::TempDir dir("empty_model");
  SparseModel empty;
  for (const ModelFormat fmt : {ModelFormat::kBinary, ModelFormat::kText}) {
    write_model(empty, dir.path, fmt);
    const SparseModel back = parse_model(dir.path, fmt);
    CHECK(back.cameras.empty());
    CHECK(back.images.empty());
    CHECK(back.points.empty());
  }
}

TEST_CASE("hand-written text model parses with reciprocal tracks") {
  testutil::TempDir dir("text_model");
  {
    std::ofstream cams(dir.path / "cameras.txt");
    cams << "# comment line\n"
         << "1 PINHOLE 640 480 500 500 320 240\n";
    std::ofstream imgs(dir.path / "images.txt");
    imgs << "1 1 0 0 0 0 0 0 1 a.png\n"
         << "10 10 1 20 20 2 30 30 3\n"
         << "2 1 0 0 0 0 0 1 1 b.png\n"
         << "11 11 1 21 21 2 31 31 3\n";
    std::ofstream pts(dir.path / "points3D.txt");
    pts << "1 0 0 5 255 0 0 0.5 1 0 2 0\n"
        << "2 1 0 5 0 255 0 0.5 1 1 2 1\n"
        << "3 0 1 5 0 0 255 0.5 1 2 2 2\n";
  }
  const SparseModel model = parse_model(dir.path, ModelFormat::kAuto);
  CHECK(model.cameras.size() == 1);
  CHECK(model.images.size() == 2);
  CHECK(model.points.size() == 3);
  CHECK(model.images.at(1).points2d.size() == 3);
  CHECK(model.points.at(2).track.size() == 2);
  CHECK(model.images.at(2).name == "b.png");
}

TEST_CASE("binary round-trip is field-for-field identity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseModel model = testutil::random_model(rng);
    testutil::TempDir dir("bin_roundtrip");
    write_model(model, dir.path, ModelFormat::kBinary);
    const SparseModel back = parse_model(dir.path, ModelFormat::kBinary);
    CHECK(back == model);
  }
}

TEST_CASE("text round-trip is exact with 17 significant digits") {
  std::mt19937_64 rng(8);
  const SparseModel model = testutil::random_model(rng);
  testutil::TempDir dir("text_roundtrip");
  write_model(model, dir.path, ModelFormat::kText);
  const SparseModel back = parse_model(dir.path, ModelFormat::kText);
  CHECK(back == model);
}

TEST_CASE("write_model output is byte-identical across runs") {
  std::mt19937_64 rng(9);
  const SparseModel model = testutil::random_model(rng);
  testutil::TempDir a("det_a");
  testutil::TempDir b("det_b");
  for (const ModelFormat fmt : {ModelFormat::kBinary, ModelFormat::kText}) {
    write_model(model, a.path, fmt);
    write_model(model, b.path, fmt);
    for (const std::string name :
         {"cameras", "images", "points3D"}) {
      const std::string ext = fmt == ModelFormat::kBinary ? ".bin" : ".txt";
      CHECK(slurp(a.path / (name + ext)) == slurp(b.path / (name + ext)));
    }
  }
}

TEST_CASE("dangling references error by default and repair leniently") {
  std::mt19937_64 rng(10);
  SparseModel model = testutil::random_model(rng);
  // Point an observation at a nonexistent 3D point.
  auto& image = model.images.begin()->second;
  image.points2d.push_back({1.0, 2.0, 999999});

  testutil::TempDir dir("dangling");
  write_model(model, dir.path, ModelFormat::kBinary);
  CHECK_THROWS_WITH_AS(parse_model(dir.path, ModelFormat::kBinary),
                       doctest::Contains("999999"), std::runtime_error);

  const SparseModel repaired =
      parse_model(dir.path, ModelFormat::kBinary, {.lenient = true});
  repaired.validate();
  CHECK(repaired.images.at(image.image_id).points2d.back().point3d_id ==
        kInvalidPoint3dId);
}

TEST_CASE("truncated binary stream errors") {
  std::mt19937_64 rng(11);
  const SparseModel model = testutil::random_model(rng);
  testutil::TempDir dir("truncated");
  write_model(model, dir.path, ModelFormat::kBinary);
  const std::string bytes = slurp(dir.path / "images.bin");
  std::ofstream out(dir.path / "images.bin", std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size() / 2));
  out.close();
  CHECK_THROWS_AS(parse_model(dir.path, ModelFormat::kBinary),
                  std::runtime_error);
}

TEST_CASE("unknown camera model id errors") {
  testutil::TempDir dir("bad_model_id");
  SparseModel empty;
  write_model(empty, dir.path, ModelFormat::kBinary);
  std::ofstream out(dir.path / "cameras.bin", std::ios::binary | std::ios::trunc);
  const uint64_t count = 1;
  const int32_t id = 1, model_id = 77;
  const uint64_t w = 10, h = 10;
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(&id), 4);
  out.write(reinterpret_cast<const char*>(&model_id), 4);
  out.write(reinterpret_cast<const char*>(&w), 8);
  out.write(reinterpret_cast<const char*>(&h), 8);
  out.close();
  CHECK_THROWS_WITH_AS(parse_model(dir.path, ModelFormat::kBinary),
                       doctest::Contains("unknown camera model"),
                       std::runtime_error);
}

TEST_CASE("missing file errors") {
  testutil::TempDir dir("missing");
  CHECK_THROWS_AS(parse_model(dir.path, ModelFormat::kAuto), std::runtime_error);
}

TEST_CASE("keypoint file round-trip") {
  testutil::TempDir dir("keypoints");
  KeypointSet kps;
  kps.width = 123;
  kps.height = 456;
  kps.keypoints = {{1.5, 2.25}, {100.0, 400.0}};
  write_keypoints(kps, dir.path / "kp.txt");
  const KeypointSet back = read_keypoints(dir.path / "kp.txt");
  CHECK(back.width == kps.width);
  CHECK(back.height == kps.height);
  REQUIRE(back.keypoints.size() == 2);
  CHECK(back.keypoints[0] == kps.keypoints[0]);
  CHECK(back.keypoints[1] == kps.keypoints[1]);
}

TEST_CASE("border masking: 4000x3000 at 5% uses a 250 px band") {
  KeypointSet kps;
  kps.width = 4000;
  kps.height = 3000;
  kps.keypoints = {{100, 100}, {300, 300}};
  const KeypointSet masked = mask_border_keypoints(kps, 0.05);
  REQUIRE(masked.keypoints.size() == 1);
  CHECK(masked.keypoints[0].x() == 300);
}

TEST_CASE("border masking with fraction 0 keeps in-bounds keypoints") {
  KeypointSet kps;
  kps.width = 50;
  kps.height = 50;
  kps.keypoints = {{0, 0}, {25, 25}, {49, 49}};
  const KeypointSet masked = mask_border_keypoints(kps, 0.0);
  CHECK(masked.keypoints.size() == 3);
}

TEST_CASE("border masking matches the brute-force filter and is idempotent") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> coord(0, 999);
  KeypointSet kps;
  kps.width = 1000;
  kps.height = 1000;
  for (int i = 0; i < 500; ++i) kps.keypoints.push_back({coord(rng), coord(rng)});

  const double band = 0.05 * std::hypot(1000.0, 1000.0);
  std::vector<Eigen::Vector2d> expected;
  for (const auto& kp : kps.keypoints) {
    const double d = std::min({kp.x(), kp.y(), 999.0 - kp.x(), 999.0 - kp.y()});
    if (!(d < band)) expected.push_back(kp);
  }

  const KeypointSet once = mask_border_keypoints(kps, 0.05);
  REQUIRE(once.keypoints.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(once.keypoints[i] == expected[i]);
  }
  const KeypointSet twice = mask_border_keypoints(once, 0.05);
  CHECK(twice.keypoints.size() == once.keypoints.size());
}

TEST_CASE("border masking rejects out-of-range fractions") {
  KeypointSet kps;
  kps.width = 10;
  kps.height = 10;
  CHECK_THROWS_AS(mask_border_keypoints(kps, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mask_border_keypoints(kps, -0.1), std::invalid_argument);
}

TEST_CASE("watermark trigger boundary at exactly 10%") {
  std::vector<std::pair<int64_t, bool>> labels;
  for (int i = 0; i < 100; ++i) labels.emplace_back(i, i < 9);
  CHECK_FALSE(watermark_trigger(labels));
  labels[9].second = true;  // 10 of 100
  CHECK(watermark_trigger(labels));
}

TEST_CASE("watermark trigger trivial and error cases") {
  CHECK_FALSE(watermark_trigger({{0, false}}));
  CHECK(watermark_trigger({{0, true}}));
  CHECK_THROWS_AS(watermark_trigger({}), std::invalid_argument);
}

TEST_CASE("watermark trigger matches the counting oracle on random labels") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<int64_t, bool>> labels;
    const int n = 1 + int(rng() % 50);
    int watermark = 0;
    for (int i = 0; i < n; ++i) {
      const bool w = rng() % 4 == 0;
      watermark += w;
      labels.emplace_back(i, w);
    }
    CHECK(watermark_trigger(labels) == (double(watermark) / n >= 0.10));
  }
}
