#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <random>

#include "testutil.hpp"
#include "viewprep/metrics.hpp"

using namespace viewprep;

namespace {

// Direct windowed SSIM, no separable filtering: every 11x11 window is summed
// explicitly with the Gaussian weights.
double oracle_ssim(const Image8& a, const Image8& b, const Mask* mask) {
  const int w = a.width;
  const int h = a.height;
  double kernel[11][11];
  double ksum = 0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double di = i - 5, dj = j - 5;
      kernel[i][j] = std::exp(-(di * di + dj * dj) / (2 * 1.5 * 1.5));
      ksum += kernel[i][j];
    }
  }
  for (auto& row : kernel) {
    for (double& v : row) v /= ksum;
  }
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);

  double total = 0;
  for (int c = 0; c < 3; ++c) {
    double sum = 0;
    size_t count = 0;
    for (int y = 5; y < h - 5; ++y) {
      for (int x = 5; x < w - 5; ++x) {
        if (mask) {
          bool all = true;
          for (int i = -5; i <= 5 && all; ++i) {
            for (int j = -5; j <= 5 && all; ++j) {
              if (!mask->at(x + j, y + i)) all = false;
            }
          }
          if (!all) continue;
        }
        double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
        for (int i = -5; i <= 5; ++i) {
          for (int j = -5; j <= 5; ++j) {
            const double k = kernel[i + 5][j + 5];
            const double va = a.at(x + j, y + i, c);
            const double vb = b.at(x + j, y + i, c);
            ma += k * va;
            mb += k * vb;
            maa += k * va * va;
            mbb += k * vb * vb;
            mab += k * va * vb;
          }
        }
        const double var_a = maa - ma * ma;
        const double var_b = mbb - mb * mb;
        const double cov = mab - ma * mb;
        sum += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        ++count;
      }
    }
    REQUIRE(count > 0);
    total += sum / double(count);
  }
  return total / 3.0;
}

}  // namespace

TEST_CASE("psnr of identical images is the cap") {
  std::mt19937_64 rng(71);
  const Image8 a = testutil::random_image(rng, 20, 20);
  CHECK(psnr(a, a) == 100.0);
}

TEST_CASE("psnr of a uniform difference of 10 is 28.1308 dB") {
  Image8 a(16, 16, 100);
  Image8 b(16, 16, 110);
  CHECK(psnr(a, b) == doctest::Approx(28.1308).epsilon(1e-5));
  CHECK(psnr(a, b) == doctest::Approx(20 * std::log10(255.0 / 10.0)).epsilon(1e-12));
}

TEST_CASE("psnr with an all-true mask equals unmasked exactly") {
  std::mt19937_64 rng(72);
  const Image8 a = testutil::random_image(rng, 24, 18);
  const Image8 b = testutil::random_image(rng, 24, 18);
  const Mask full(24, 18, 1);
  CHECK(psnr(a, b, &full) == psnr(a, b));
}

TEST_CASE("psnr is symmetric") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const Image8 a = testutil::random_image(rng, 15, 12);
    const Image8 b = testutil::random_image(rng, 15, 12);
    CHECK(psnr(a, b) == psnr(b, a));
  }
}

TEST_CASE("psnr validates dimensions and mask") {
  CHECK_THROWS_AS(psnr(Image8(4, 4), Image8(4, 5)), std::invalid_argument);
  const Mask empty(4, 4, 0);
  CHECK_THROWS_AS(psnr(Image8(4, 4), Image8(4, 4), &empty), std::invalid_argument);
}

TEST_CASE("ssim of an image with itself is exactly 1") {
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 5; ++trial) {
    const Image8 a = testutil::random_image(rng, 19, 23);
    CHECK(ssim(a, a) == 1.0);
  }
}

TEST_CASE("ssim against a constant offset matches the direct formula") {
  std::mt19937_64 rng(75);
  Image8 a = testutil::random_image(rng, 32, 28);
  Image8 b = a;
  for (auto& v : b.data) v = uint8_t(std::min(255, v + 20));
  const double expected = oracle_ssim(a, b, nullptr);
  CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ssim(a, b) < 1.0);
}

TEST_CASE("ssim on random pairs matches the direct formula") {
  std::mt19937_64 rng(76);
  for (int trial = 0; trial < 5; ++trial) {
    const Image8 a = testutil::random_image(rng, 25, 21);
    const Image8 b = testutil::random_image(rng, 25, 21);
    CHECK(ssim(a, b) == doctest::Approx(oracle_ssim(a, b, nullptr)).epsilon(1e-11));
  }
}

TEST_CASE("ssim with an all-true mask equals unmasked within 1e-12") {
  std::mt19937_64 rng(77);
  const Image8 a = testutil::random_image(rng, 26, 22);
  const Image8 b = testutil::random_image(rng, 26, 22);
  const Mask full(26, 22, 1);
  CHECK(ssim(a, b, &full) == doctest::Approx(ssim(a, b)).epsilon(1e-12));
}

TEST_CASE("masked ssim only averages fully interior windows") {
  std::mt19937_64 rng(78);
  const Image8 a = testutil::random_image(rng, 40, 30);
  const Image8 b = testutil::random_image(rng, 40, 30);
  Mask mask(40, 30, 0);
  for (int y = 4; y < 26; ++y) {
    for (int x = 6; x < 32; ++x) mask.set(x, y, true);
  }
  CHECK(ssim(a, b, &mask) ==
        doctest::Approx(oracle_ssim(a, b, &mask)).epsilon(1e-11));
}

TEST_CASE("ssim rejects images smaller than the window") {
  CHECK_THROWS_AS(ssim(Image8(10, 12), Image8(10, 12)), std::invalid_argument);
}

TEST_CASE("ssim throws when no window fits in the mask") {
  const Image8 a(20, 20);
  Mask tiny(20, 20, 0);
  tiny.set(10, 10, true);
  CHECK_THROWS_AS(ssim(a, a, &tiny), std::invalid_argument);
}

TEST_CASE("serial and parallel ssim agree bitwise") {
  std::mt19937_64 rng(79);
  const Image8 a = testutil::random_image(rng, 64, 48);
  const Image8 b = testutil::random_image(rng, 64, 48);
  const double serial = ssim_serial(a, b);
  for (const int threads : {1, 2, 8}) {
    omp_set_num_threads(threads);
    CHECK(ssim(a, b) == serial);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("report for gen == target hits the caps") {
  std::mt19937_64 rng(80);
  const Image8 target = testutil::random_image(rng, 32, 32);
  WarpOutput w;
  w.rgb = target;
  w.mask = Mask(32, 32, 1);
  w.depth = testutil::constant_depth(32, 32, 1.0);

  const MetricReport r = report(target, target, w);
  CHECK(r.psnr == 100.0);
  CHECK(r.ssim == 1.0);
  CHECK(r.mask_coverage == 1.0);
  REQUIRE(r.masked_psnr.has_value());
  REQUIRE(r.masked_ssim.has_value());
  CHECK(*r.masked_psnr == 100.0);
  CHECK(*r.masked_ssim == 1.0);
}

TEST_CASE("masked metrics ignore pixels outside the mask (restriction oracle)") {
  std::mt19937_64 rng(81);
  const int side = 44;
  const Image8 target = testutil::random_image(rng, side, side);

  WarpOutput w;
  w.rgb = target;
  w.mask = Mask(side, side, 0);
  for (int y = 8; y < 36; ++y) {
    for (int x = 8; x < 36; ++x) w.mask.set(x, y, true);
  }
  w.depth = testutil::constant_depth(side, side, 1.0);

  // gen agrees with the warp inside the mask, noise elsewhere.
  Image8 gen = testutil::random_image(rng, side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!w.mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) gen.at(x, y, c) = w.rgb.at(x, y, c);
    }
  }

  const MetricReport r = report(gen, target, w);
  REQUIRE(r.masked_psnr.has_value());
  CHECK(*r.masked_psnr == 100.0);  // identical inside the mask
  REQUIRE(r.masked_ssim.has_value());
  CHECK(*r.masked_ssim == doctest::Approx(1.0).epsilon(1e-12));

  // Independent path: crop the mask region and compare unmasked.
  Image8 gen_crop(28, 28), tgt_crop(28, 28);
  for (int y = 0; y < 28; ++y) {
    for (int x = 0; x < 28; ++x) {
      for (int c = 0; c < 3; ++c) {
        gen_crop.at(x, y, c) = gen.at(x + 8, y + 8, c);
        tgt_crop.at(x, y, c) = target.at(x + 8, y + 8, c);
      }
    }
  }
  const double cropped_psnr = psnr(gen_crop, tgt_crop);
  CHECK(*r.masked_psnr == doctest::Approx(cropped_psnr).epsilon(1e-12));
}

TEST_CASE("changing masked-out pixels never changes masked metrics") {
  std::mt19937_64 rng(82);
  const int side = 40;
  const Image8 target = testutil::random_image(rng, side, side);
  Image8 gen = testutil::random_image(rng, side, side);

  WarpOutput w;
  w.rgb = target;
  w.mask = Mask(side, side, 0);
  for (int y = 5; y < 35; ++y) {
    for (int x = 5; x < 35; ++x) w.mask.set(x, y, true);
  }
  w.depth = testutil::constant_depth(side, side, 1.0);

  const MetricReport before = report(gen, target, w);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (w.mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) gen.at(x, y, c) = uint8_t(rng() % 256);
    }
  }
  const MetricReport after = report(gen, target, w);
  CHECK(*before.masked_psnr == *after.masked_psnr);
  CHECK(*before.masked_ssim == *after.masked_ssim);
}

TEST_CASE("empty mask leaves masked fields empty with zero coverage") {
  std::mt19937_64 rng(83);
  const Image8 target = testutil::random_image(rng, 20, 20);
  WarpOutput w;
  w.rgb = target;
  w.mask = Mask(20, 20, 0);
  w.depth = DepthMap(20, 20);

  const MetricReport r = report(target, target, w);
  CHECK(r.mask_coverage == 0.0);
  CHECK_FALSE(r.masked_psnr.has_value());
  CHECK_FALSE(r.masked_ssim.has_value());
}
