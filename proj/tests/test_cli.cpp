#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "testutil.hpp"
#include "viewprep/model_io.hpp"

using namespace viewprep;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& out, const fs::path& err) {
  const std::string command = std::string(VIEWPREP_CLI_PATH) + " " + args +
                              " > " + out.string() + " 2> " + err.string();
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

TEST_CASE("mask-keypoints runs end to end with exit 0") {
  testutil::TempDir dir("cli_mask");
  {
    std::ofstream kp(dir.path / "kp.txt");
    kp << "100 100 2\n5 5\n50 50\n";
  }
  const int status =
      run("mask-keypoints --input " + (dir.path / "kp.txt").string() +
              " --output " + (dir.path / "out.txt").string(),
          dir.path / "stdout", dir.path / "stderr");
  CHECK(status == 0);
  const KeypointSet masked = read_keypoints(dir.path / "out.txt");
  CHECK(masked.keypoints.size() == 1);
  CHECK(slurp(dir.path / "stdout").find("command=mask-keypoints") !=
        std::string::npos);
}

TEST_CASE("dry-run prints the resolved config and writes nothing") {
  testutil::TempDir dir("cli_dry");
  {
    std::ofstream kp(dir.path / "kp.txt");
    kp << "10 10 1\n5 5\n";
  }
  const int status =
      run("--dry-run mask-keypoints --input " + (dir.path / "kp.txt").string() +
              " --output " + (dir.path / "out.txt").string(),
          dir.path / "stdout", dir.path / "stderr");
  CHECK(status == 0);
  CHECK_FALSE(fs::exists(dir.path / "out.txt"));
  const std::string out = slurp(dir.path / "stdout");
  CHECK(out.find("min_shared=50") != std::string::npos);
  CHECK(out.find("planned command: mask-keypoints") != std::string::npos);
}

TEST_CASE("data errors exit 1, config errors exit 2") {
  testutil::TempDir dir("cli_err");
  // Missing input file: data error.
  CHECK(run("mask-keypoints --input " + (dir.path / "absent.txt").string() +
                " --output " + (dir.path / "o.txt").string(),
            dir.path / "stdout", dir.path / "stderr") == 1);

  // Unknown config key: config error.
  {
    std::ofstream bad(dir.path / "bad.conf");
    bad << "bogus=1\n";
  }
  CHECK(run("--config " + (dir.path / "bad.conf").string() +
                " parse --model " + dir.path.string(),
            dir.path / "stdout", dir.path / "stderr") == 2);
}

TEST_CASE("parse converts between binary and text models") {
  std::mt19937_64 rng(5);
  const SparseModel model = testutil::random_model(rng, 3, 10);
  testutil::TempDir dir("cli_parse");
  write_model(model, dir.path / "in", ModelFormat::kBinary);

  const int status = run("parse --model " + (dir.path / "in").string() +
                             " --out " + (dir.path / "out").string() +
                             " --out-format text",
                         dir.path / "stdout", dir.path / "stderr");
  CHECK(status == 0);
  const SparseModel back = parse_model(dir.path / "out", ModelFormat::kText);
  CHECK(back == model);
  const std::string out = slurp(dir.path / "stdout");
  CHECK(out.find("images=3") != std::string::npos);
}

TEST_CASE("identify works against the fixture dir through the CLI") {
  testutil::TempDir dir("cli_identify");
  const std::string fixtures =
      std::string(VIEWPREP_SOURCE_DIR) + "/tests/fixtures/crawler";
  const int status =
      run("identify --classes Q12280,Q483453 --fixture-dir " + fixtures +
              " --out " + (dir.path / "scenes.tsv").string(),
          dir.path / "stdout", dir.path / "stderr");
  CHECK(status == 0);
  const std::string scenes = slurp(dir.path / "scenes.tsv");
  CHECK(scenes.find("Stone Arch Bridge") != std::string::npos);
  CHECK(scenes.find("Windmills") == std::string::npos);  // cyclic filter
  const std::string out = slurp(dir.path / "stdout");
  CHECK(out.find("command=identify") != std::string::npos);
}

TEST_CASE("parse --gravity-align reports the applied rotation") {
  SparseModel model;
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kSimplePinhole;
  cam.width = 32;
  cam.height = 32;
  cam.params = {32, 16, 16};
  model.cameras.emplace(1, cam);
  for (int i = 0; i < 4; ++i) {
    RegisteredImage image;
    image.image_id = i + 1;
    image.name = "g" + std::to_string(i) + ".png";
    image.camera_id = 1;
    // Rolled 90 degrees about x: camera +y points along world -z... after
    // alignment the mean down-axis must be -z again.
    image.pose.rotation = Eigen::Quaterniond(
        Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitX()));
    image.pose.translation = {double(i), 0, 0};
    model.images.emplace(image.image_id, std::move(image));
  }

  testutil::TempDir dir("cli_gravity");
  write_model(model, dir.path / "in", ModelFormat::kBinary);
  const int status = run("parse --model " + (dir.path / "in").string() +
                             " --gravity-align --out " +
                             (dir.path / "out").string(),
                         dir.path / "stdout", dir.path / "stderr");
  CHECK(status == 0);
  CHECK(slurp(dir.path / "stdout").find("gravity_rotation=") !=
        std::string::npos);

  const SparseModel aligned = parse_model(dir.path / "out");
  Eigen::Vector3d mean_down = Eigen::Vector3d::Zero();
  for (const auto& [id, image] : aligned.images) {
    (void)id;
    mean_down += image.pose.rotation.conjugate() * Eigen::Vector3d::UnitY();
  }
  mean_down.normalize();
  CHECK((mean_down - Eigen::Vector3d(0, 0, -1)).norm() < 1e-9);
}

TEST_CASE("rerunning a command produces byte-identical outputs") {
  testutil::TempDir dir("cli_rerun");
  const std::string fixtures =
      std::string(VIEWPREP_SOURCE_DIR) + "/tests/fixtures/crawler";
  for (const char* name : {"a.tsv", "b.tsv"}) {
    const int status =
        run("manifest --scene \"Old Town Cathedral\" --entity Q110 "
            "--fixture-dir " +
                fixtures + " --out " + (dir.path / name).string(),
            dir.path / "stdout", dir.path / "stderr");
    REQUIRE(status == 0);
  }
  CHECK(slurp(dir.path / "a.tsv") == slurp(dir.path / "b.tsv"));
  CHECK(slurp(dir.path / "a.tsv").find("File:Cath_west.jpg") != std::string::npos);
}
