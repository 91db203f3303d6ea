// Serial-vs-OpenMP comparison for the three data-parallel kernels:
// rasterization, SSIM filtering, RANSAC hypothesis scoring.

#include <benchmark/benchmark.h>

#include <random>

#include "viewprep/depth_align.hpp"
#include "viewprep/image.hpp"
#include "viewprep/metrics.hpp"
#include "viewprep/warp.hpp"

using namespace viewprep;

namespace {

CameraIntrinsics bench_camera(int side) {
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kPinhole;
  cam.width = side;
  cam.height = side;
  cam.params = {double(side), double(side), side / 2.0, side / 2.0};
  return cam;
}

// Height-field mesh over a bumpy surface; roughly 2*(side-1)^2 triangles.
WarpMesh bench_mesh(int side) {
  const auto cam = bench_camera(side);
  Image8 rgb(side, side);
  DepthMap depth(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      depth.set(x, y, 5.0 + std::sin(0.2 * x) * std::cos(0.17 * y));
      rgb.at(x, y, 0) = uint8_t((x * 7) % 256);
      rgb.at(x, y, 1) = uint8_t((y * 5) % 256);
      rgb.at(x, y, 2) = uint8_t((x + y) % 256);
    }
  }
  return build_mesh(rgb, depth, cam, Pose{}, 0.5);
}

Pose offset_pose() {
  Pose pose;
  pose.translation = {0.15, -0.1, -0.4};
  return pose;
}

void BM_RasterizeSerial(benchmark::State& state) {
  const int side = int(state.range(0));
  const auto cam = bench_camera(side);
  const WarpMesh mesh = bench_mesh(side);
  const Pose pose = offset_pose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize_serial(mesh, cam, pose));
  }
}

void BM_RasterizeOmp(benchmark::State& state) {
  const int side = int(state.range(0));
  const auto cam = bench_camera(side);
  const WarpMesh mesh = bench_mesh(side);
  const Pose pose = offset_pose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize(mesh, cam, pose));
  }
}

Image8 bench_image(int side, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image8 image(side, side);
  for (auto& v : image.data) v = uint8_t(rng() % 256);
  return image;
}

void BM_SsimSerial(benchmark::State& state) {
  const int side = int(state.range(0));
  const Image8 a = bench_image(side, 1);
  const Image8 b = bench_image(side, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssim_serial(a, b));
  }
}

void BM_SsimOmp(benchmark::State& state) {
  const int side = int(state.range(0));
  const Image8 a = bench_image(side, 1);
  const Image8 b = bench_image(side, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssim(a, b));
  }
}

struct RansacInput {
  DepthMap mono;
  SparseDepth sparse;
};

RansacInput bench_ransac_input(int n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dval(1.0, 10.0);
  std::uniform_real_distribution<double> unit(0, 1);
  const int side = 64;
  RansacInput input;
  input.mono = DepthMap(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) input.mono.set(x, y, dval(rng));
  }
  for (int i = 0; i < n; ++i) {
    const int x = int(rng() % side);
    const int y = int(rng() % side);
    double sfm = 2.0 * input.mono.at(x, y) + 0.5;
    if (unit(rng) < 0.3) sfm *= 1.5 + unit(rng);
    input.sparse.push_back({{x + 0.5, y + 0.5}, sfm, i});
  }
  return input;
}

void BM_RansacSerial(benchmark::State& state) {
  const auto input = bench_ransac_input(int(state.range(0)));
  RansacParams params;
  params.iterations = 2000;
  params.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ransac_align_serial(input.mono, input.sparse, params));
  }
}

void BM_RansacOmp(benchmark::State& state) {
  const auto input = bench_ransac_input(int(state.range(0)));
  RansacParams params;
  params.iterations = 2000;
  params.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ransac_align(input.mono, input.sparse, params));
  }
}

}  // namespace

BENCHMARK(BM_RasterizeSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RasterizeOmp)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SsimSerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SsimOmp)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RansacSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RansacOmp)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
