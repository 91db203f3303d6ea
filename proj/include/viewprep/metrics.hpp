#pragma once

#include <optional>

#include "viewprep/image.hpp"
#include "viewprep/warp.hpp"

namespace viewprep {

struct MetricReport {
  double psnr = 0;
  double ssim = 0;
  std::optional<double> masked_psnr;
  std::optional<double> masked_ssim;
  double mask_coverage = 0;
};

inline constexpr double kPsnrCap = 100.0;  // dB, returned for identical inputs

// 10*log10(255^2 / MSE) over all pixels, or over mask when given. Throws on
// dimension mismatch or an empty mask.
double psnr(const Image8& a, const Image8& b, const Mask* mask = nullptr,
            double cap = kPsnrCap);

// Single-scale SSIM: 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03,
// dynamic range 255, per channel then averaged. The SSIM map is defined at
// positions whose window lies fully inside the image; the masked variant
// averages only positions whose window lies fully inside the mask. Throws
// when the image is smaller than the window or no window qualifies.
double ssim(const Image8& a, const Image8& b, const Mask* mask = nullptr);

// Serial reference for the filtering; kept for tests and benchmarks.
double ssim_serial(const Image8& a, const Image8& b, const Mask* mask = nullptr);

// Unmasked metrics over (gen, target), masked metrics restricted to
// warp.mask. Masked fields are empty when no pixel (psnr) or no fully
// interior window (ssim) qualifies.
MetricReport report(const Image8& gen, const Image8& target,
                    const WarpOutput& warp);

}  // namespace viewprep
