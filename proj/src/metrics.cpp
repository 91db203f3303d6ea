#include "viewprep/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace viewprep {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kRange = 255.0;

void check_dims(const Image8& a, const Image8& b, const Mask* mask) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("metric inputs have different dimensions");
  }
  if (mask && (mask->width != a.width || mask->height != a.height)) {
    throw std::invalid_argument("mask dimensions differ from images");
  }
}

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k;
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    k[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian filter; only positions with the full window inside the
// image are produced (the border stays zero and is never read).
void gaussian_filter(const std::vector<double>& in, int width, int height,
                     std::vector<double>& tmp, std::vector<double>& out,
                     bool parallel) {
  static const std::array<double, kWindow> kernel = gaussian_kernel();

#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < height; ++y) {
    for (int x = kRadius; x < width - kRadius; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k) {
        acc += kernel[k] * in[size_t(y) * width + x - kRadius + k];
      }
      tmp[size_t(y) * width + x] = acc;
    }
  }

#pragma omp parallel for schedule(static) if (parallel)
  for (int y = kRadius; y < height - kRadius; ++y) {
    for (int x = kRadius; x < width - kRadius; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k) {
        acc += kernel[k] * tmp[size_t(y - kRadius + k) * width + x];
      }
      out[size_t(y) * width + x] = acc;
    }
  }
}

// Per-window count of set mask pixels via a summed-area table.
std::vector<uint32_t> window_mask_counts(const Mask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<uint64_t> sat(size_t(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      sat[size_t(y + 1) * (w + 1) + (x + 1)] =
          sat[size_t(y) * (w + 1) + (x + 1)] +
          sat[size_t(y + 1) * (w + 1) + x] - sat[size_t(y) * (w + 1) + x] +
          (mask.at(x, y) ? 1 : 0);
    }
  }
  std::vector<uint32_t> counts(size_t(w) * h, 0);
  for (int y = kRadius; y < h - kRadius; ++y) {
    for (int x = kRadius; x < w - kRadius; ++x) {
      const int x0 = x - kRadius, y0 = y - kRadius;
      const int x1 = x + kRadius + 1, y1 = y + kRadius + 1;
      counts[size_t(y) * w + x] = uint32_t(
          sat[size_t(y1) * (w + 1) + x1] - sat[size_t(y0) * (w + 1) + x1] -
          sat[size_t(y1) * (w + 1) + x0] + sat[size_t(y0) * (w + 1) + x0]);
    }
  }
  return counts;
}

std::optional<double> ssim_impl(const Image8& a, const Image8& b,
                                const Mask* mask, bool parallel) {
  check_dims(a, b, mask);
  const int w = a.width;
  const int h = a.height;
  if (w < kWindow || h < kWindow) {
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  }

  std::vector<uint32_t> counts;
  if (mask) counts = window_mask_counts(*mask);

  const double c1 = (kK1 * kRange) * (kK1 * kRange);
  const double c2 = (kK2 * kRange) * (kK2 * kRange);
  const size_t n = size_t(w) * h;

  std::vector<double> xa(n), xb(n), xaa(n), xbb(n), xab(n);
  std::vector<double> mu_a(n, 0), mu_b(n, 0), m_aa(n, 0), m_bb(n, 0), m_ab(n, 0);
  std::vector<double> tmp(n, 0);

  double total = 0;
  size_t positions = 0;
  for (int c = 0; c < 3; ++c) {
    for (size_t i = 0; i < n; ++i) {
      xa[i] = a.data[i * 3 + c];
      xb[i] = b.data[i * 3 + c];
      xaa[i] = xa[i] * xa[i];
      xbb[i] = xb[i] * xb[i];
      xab[i] = xa[i] * xb[i];
    }
    gaussian_filter(xa, w, h, tmp, mu_a, parallel);
    gaussian_filter(xb, w, h, tmp, mu_b, parallel);
    gaussian_filter(xaa, w, h, tmp, m_aa, parallel);
    gaussian_filter(xbb, w, h, tmp, m_bb, parallel);
    gaussian_filter(xab, w, h, tmp, m_ab, parallel);

    double channel_sum = 0;
    size_t channel_positions = 0;
    for (int y = kRadius; y < h - kRadius; ++y) {
      for (int x = kRadius; x < w - kRadius; ++x) {
        const size_t i = size_t(y) * w + x;
        if (mask && counts[i] != uint32_t(kWindow * kWindow)) continue;
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double var_a = m_aa[i] - ma * ma;
        const double var_b = m_bb[i] - mb * mb;
        const double cov = m_ab[i] - ma * mb;
        const double value = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                             ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        channel_sum += value;
        ++channel_positions;
      }
    }
    if (channel_positions == 0) return std::nullopt;
    total += channel_sum / double(channel_positions);
    positions = channel_positions;
  }
  (void)positions;
  return total / 3.0;
}

}  // namespace

double psnr(const Image8& a, const Image8& b, const Mask* mask, double cap) {
  check_dims(a, b, mask);
  double sq_sum = 0;
  size_t count = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (mask && !mask->at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = double(a.at(x, y, c)) - double(b.at(x, y, c));
        sq_sum += d * d;
      }
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("psnr: empty mask");
  const double mse = sq_sum / double(count * 3);
  if (mse == 0) return cap;
  return 10.0 * std::log10(kRange * kRange / mse);
}

double ssim(const Image8& a, const Image8& b, const Mask* mask) {
  const auto value = ssim_impl(a, b, mask, /*parallel=*/true);
  if (!value) throw std::invalid_argument("ssim: no fully interior window");
  return *value;
}

double ssim_serial(const Image8& a, const Image8& b, const Mask* mask) {
  const auto value = ssim_impl(a, b, mask, /*parallel=*/false);
  if (!value) throw std::invalid_argument("ssim: no fully interior window");
  return *value;
}

MetricReport report(const Image8& gen, const Image8& target,
                    const WarpOutput& warp) {
  MetricReport r;
  r.psnr = psnr(gen, target);
  r.ssim = ssim(gen, target);
  r.mask_coverage = warp.mask.coverage();
  if (warp.mask.count() > 0) {
    r.masked_psnr = psnr(gen, target, &warp.mask);
    r.masked_ssim = ssim_impl(gen, target, &warp.mask, /*parallel=*/true);
  }
  return r;
}

}  // namespace viewprep
