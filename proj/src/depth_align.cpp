#include "viewprep/depth_align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace viewprep {

namespace {

struct Hypothesis {
  double a = 0;
  double b = 0;
  bool valid = false;
};

struct Score {
  size_t inliers = 0;
  double rms = std::numeric_limits<double>::infinity();
  int iteration = -1;

  bool better_than(const Score& other) const {
    if (inliers != other.inliers) return inliers > other.inliers;
    if (rms != other.rms) return rms < other.rms;
    return iteration < other.iteration;
  }
};

Score score_hypothesis(const Hypothesis& h, const std::vector<double>& mono,
                       const std::vector<double>& sfm, double threshold,
                       int iteration) {
  Score s;
  s.iteration = iteration;
  if (!h.valid) return s;
  double sq_sum = 0;
  size_t count = 0;
  for (size_t i = 0; i < mono.size(); ++i) {
    const double residual = h.a * mono[i] + h.b - sfm[i];
    if (std::abs(residual) / sfm[i] < threshold) {
      ++count;
      sq_sum += residual * residual;
    }
  }
  s.inliers = count;
  s.rms = count ? std::sqrt(sq_sum / double(count))
                : std::numeric_limits<double>::infinity();
  return s;
}

std::vector<uint8_t> inlier_flags_for(const Hypothesis& h,
                                      const std::vector<double>& mono,
                                      const std::vector<double>& sfm,
                                      double threshold) {
  std::vector<uint8_t> flags(mono.size(), 0);
  for (size_t i = 0; i < mono.size(); ++i) {
    const double residual = h.a * mono[i] + h.b - sfm[i];
    flags[i] = std::abs(residual) / sfm[i] < threshold ? 1 : 0;
  }
  return flags;
}

// Least-squares refit of (a, b) over the flagged subset; b forced to 0 in
// scale-only mode.
Hypothesis refit(const std::vector<double>& mono, const std::vector<double>& sfm,
                 const std::vector<uint8_t>& flags, bool scale_only) {
  double sum_m = 0, sum_s = 0, sum_mm = 0, sum_ms = 0;
  size_t n = 0;
  for (size_t i = 0; i < mono.size(); ++i) {
    if (!flags[i]) continue;
    ++n;
    sum_m += mono[i];
    sum_s += sfm[i];
    sum_mm += mono[i] * mono[i];
    sum_ms += mono[i] * sfm[i];
  }
  Hypothesis h;
  if (n == 0) return h;
  if (scale_only) {
    if (sum_mm <= 0) return h;
    h.a = sum_ms / sum_mm;
    h.b = 0;
    h.valid = true;
    return h;
  }
  const double det = sum_mm * double(n) - sum_m * sum_m;
  if (std::abs(det) < 1e-15) return h;
  h.a = (sum_ms * double(n) - sum_m * sum_s) / det;
  h.b = (sum_mm * sum_s - sum_m * sum_ms) / det;
  h.valid = true;
  return h;
}

// Hypotheses are pre-generated serially from the seed so that the search
// result is identical no matter how the scoring loop is scheduled.
std::vector<Hypothesis> make_hypotheses(const std::vector<double>& mono,
                                        const std::vector<double>& sfm,
                                        const RansacParams& params) {
  const size_t n = mono.size();
  std::mt19937_64 rng(params.seed);
  std::vector<Hypothesis> hyps(params.iterations);
  for (int it = 0; it < params.iterations; ++it) {
    if (params.scale_only) {
      const size_t i = rng() % n;
      if (mono[i] > 1e-12) {
        hyps[it] = {sfm[i] / mono[i], 0.0, true};
      }
      continue;
    }
    const size_t i = rng() % n;
    size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    const double dm = mono[j] - mono[i];
    if (std::abs(dm) < 1e-12) continue;  // degenerate sample
    const double a = (sfm[j] - sfm[i]) / dm;
    if (a <= 0) continue;  // depth scales are positive by construction
    hyps[it] = {a, sfm[i] - a * mono[i], true};
  }
  return hyps;
}

AlignmentResult finish(const std::vector<double>& mono,
                       const std::vector<double>& sfm,
                       const std::vector<Hypothesis>& hyps, const Score& best,
                       const RansacParams& params, int min_inliers) {
  if (best.iteration < 0 || best.inliers == 0) {
    throw std::runtime_error("ransac_align: no non-degenerate hypothesis");
  }
  if (best.inliers < size_t(min_inliers)) {
    throw std::runtime_error(
        "ransac_align: best hypothesis has " + std::to_string(best.inliers) +
        " inliers, need " + std::to_string(min_inliers));
  }

  const Hypothesis& raw = hyps[best.iteration];
  const std::vector<uint8_t> flags =
      inlier_flags_for(raw, mono, sfm, params.inlier_threshold);
  const Hypothesis fitted = refit(mono, sfm, flags, params.scale_only);
  if (!fitted.valid || fitted.a <= 0) {
    throw std::runtime_error("ransac_align: refit produced non-positive scale");
  }

  AlignmentResult result;
  result.scale = fitted.a;
  result.shift = fitted.b;
  result.inlier_flags = flags;
  result.inlier_count = best.inliers;
  double sq_sum = 0;
  for (size_t i = 0; i < mono.size(); ++i) {
    if (!flags[i]) continue;
    const double r = fitted.a * mono[i] + fitted.b - sfm[i];
    sq_sum += r * r;
  }
  result.residual_rms = std::sqrt(sq_sum / double(best.inliers));
  return result;
}

int resolve_min_inliers(const RansacParams& params, size_t n) {
  if (params.min_inliers > 0) return params.min_inliers;
  return std::max<int>(10, int(std::ceil(0.2 * double(n))));
}

AlignmentResult ransac_impl(const DepthMap& mono_map, const SparseDepth& sparse,
                            const RansacParams& params, bool parallel) {
  if (params.iterations <= 0) {
    throw std::invalid_argument("ransac_align: iterations must be positive");
  }
  const DepthCorrespondences corr = collect_correspondences(mono_map, sparse);
  const size_t n = corr.mono.size();
  if (n < 2) {
    throw std::runtime_error("ransac_align: need at least 2 correspondences, got " +
                             std::to_string(n));
  }
  const int min_inliers = resolve_min_inliers(params, n);
  const auto hyps = make_hypotheses(corr.mono, corr.sfm, params);

  Score best;
  if (parallel) {
    std::vector<Score> scores(hyps.size());
#pragma omp parallel for schedule(static)
    for (int it = 0; it < int(hyps.size()); ++it) {
      scores[it] = score_hypothesis(hyps[it], corr.mono, corr.sfm,
                                    params.inlier_threshold, it);
    }
    for (const Score& s : scores) {
      if (s.better_than(best)) best = s;
    }
  } else {
    for (int it = 0; it < int(hyps.size()); ++it) {
      const Score s = score_hypothesis(hyps[it], corr.mono, corr.sfm,
                                       params.inlier_threshold, it);
      if (s.better_than(best)) best = s;
    }
  }
  return finish(corr.mono, corr.sfm, hyps, best, params, min_inliers);
}

}  // namespace

SparseDepth sparse_depth_for_image(const SparseModel& model, int32_t image_id) {
  const auto it = model.images.find(image_id);
  if (it == model.images.end()) {
    throw std::invalid_argument("sparse_depth_for_image: image " +
                                std::to_string(image_id) + " not registered");
  }
  const RegisteredImage& image = it->second;

  SparseDepth out;
  for (const Observation& obs : image.points2d) {
    if (obs.point3d_id == kInvalidPoint3dId) continue;
    const Point3D& point = model.points.at(obs.point3d_id);
    const double depth = image.pose.apply(point.xyz).z();
    if (depth <= 0) continue;  // behind the camera
    out.push_back({{obs.x, obs.y}, depth, obs.point3d_id});
  }
  if (out.empty()) {
    throw std::runtime_error("sparse_depth_for_image: image " +
                             std::to_string(image_id) +
                             " has no usable observations");
  }
  return out;
}

DepthCorrespondences collect_correspondences(const DepthMap& mono,
                                             const SparseDepth& sparse) {
  DepthCorrespondences corr;
  for (const SparseDepthEntry& entry : sparse) {
    // Nearest pixel, no interpolation.
    const int x = std::clamp(int(std::floor(entry.pixel.x())), 0, mono.width - 1);
    const int y = std::clamp(int(std::floor(entry.pixel.y())), 0, mono.height - 1);
    if (!mono.is_valid(x, y)) continue;
    corr.mono.push_back(mono.at(x, y));
    corr.sfm.push_back(entry.depth);
  }
  return corr;
}

AlignmentResult ransac_align(const DepthMap& mono, const SparseDepth& sparse,
                             const RansacParams& params) {
  return ransac_impl(mono, sparse, params, /*parallel=*/true);
}

AlignmentResult ransac_align_serial(const DepthMap& mono,
                                    const SparseDepth& sparse,
                                    const RansacParams& params) {
  return ransac_impl(mono, sparse, params, /*parallel=*/false);
}

DepthMap apply_alignment(const DepthMap& mono, const AlignmentResult& a) {
  DepthMap out(mono.width, mono.height);
  for (size_t i = 0; i < mono.values.size(); ++i) {
    if (!mono.valid[i]) continue;
    const double v = a.scale * mono.values[i] + a.shift;
    if (v > 0) {
      out.values[i] = v;
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace viewprep
