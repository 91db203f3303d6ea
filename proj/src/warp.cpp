#include "viewprep/warp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace viewprep {

namespace {

struct TriangleSetup {
  double x0, y0, x1, y1, x2, y2;
  double z0, z1, z2;
  const std::array<uint8_t, 3>*rgb0, *rgb1, *rgb2;
  double area;  // signed, from the same edge expression used per pixel
  int min_px, max_px, min_py, max_py;
};

inline double edge(double ax, double ay, double bx, double by, double px,
                   double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

struct Framebuffer {
  int width = 0;
  int height = 0;
  std::vector<double> zbuf;
  Image8* rgb = nullptr;
  Mask* mask = nullptr;
  DepthMap* depth = nullptr;
};

// Evaluates one triangle at one pixel center and updates the z-buffer. The
// exact same instruction sequence runs in the serial and row-parallel paths,
// which is what makes their outputs byte-identical.
inline void shade_pixel(const TriangleSetup& t, int px, int py,
                        Framebuffer& fb) {
  const double cx = px + 0.5;
  const double cy = py + 0.5;
  const double e0 = edge(t.x1, t.y1, t.x2, t.y2, cx, cy);
  const double e1 = edge(t.x2, t.y2, t.x0, t.y0, cx, cy);
  const double e2 = edge(t.x0, t.y0, t.x1, t.y1, cx, cy);

  // Edge-inclusive with a sub-ulp tolerance: projection round-trips move
  // vertices by ~1e-13 px, and mesh-boundary pixel centers must not lose
  // coverage to that noise.
  const double eps = 1e-9 * std::max(1.0, std::abs(t.area));
  const bool inside = (e0 >= -eps && e1 >= -eps && e2 >= -eps) ||
                      (e0 <= eps && e1 <= eps && e2 <= eps);
  if (!inside) return;

  const double l0 = e0 / t.area;
  const double l1 = e1 / t.area;
  const double l2 = e2 / t.area;

  const double inv_z = l0 / t.z0 + l1 / t.z1 + l2 / t.z2;
  if (!(inv_z > 0)) return;
  const double z = 1.0 / inv_z;

  const size_t idx = fb.mask->index(px, py);
  if (!(z < fb.zbuf[idx])) return;  // strict: depth ties keep the earlier triangle
  fb.zbuf[idx] = z;
  fb.mask->data[idx] = 1;
  fb.depth->values[idx] = z;
  fb.depth->valid[idx] = 1;
  for (int c = 0; c < 3; ++c) {
    const double value = (l0 * ((*t.rgb0)[c] / t.z0) + l1 * ((*t.rgb1)[c] / t.z1) +
                          l2 * ((*t.rgb2)[c] / t.z2)) /
                         inv_z;
    const long rounded = std::lround(value);
    fb.rgb->data[idx * 3 + c] =
        static_cast<uint8_t>(std::clamp(rounded, 0L, 255L));
  }
}

struct ProjectedMesh {
  std::vector<TriangleSetup> setups;  // in ascending triangle-index order
};

ProjectedMesh project_mesh(const WarpMesh& mesh, const CameraIntrinsics& camera,
                           const Pose& pose, int width, int height) {
  const size_t n = mesh.vertices.size();
  std::vector<Eigen::Vector2d> pixel(n);
  std::vector<double> z(n);
  std::vector<uint8_t> behind(n, 0);

#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i) {
    const Projection p = project(camera, pose, mesh.vertices[i].xyz);
    pixel[i] = p.pixel;
    z[i] = p.depth;
    behind[i] = p.behind ? 1 : 0;
  }

  ProjectedMesh out;
  out.setups.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    const uint32_t a = tri[0], b = tri[1], c = tri[2];
    if (behind[a] || behind[b] || behind[c]) continue;

    TriangleSetup s;
    s.x0 = pixel[a].x();
    s.y0 = pixel[a].y();
    s.x1 = pixel[b].x();
    s.y1 = pixel[b].y();
    s.x2 = pixel[c].x();
    s.y2 = pixel[c].y();
    s.z0 = z[a];
    s.z1 = z[b];
    s.z2 = z[c];
    s.rgb0 = &mesh.vertices[a].rgb;
    s.rgb1 = &mesh.vertices[b].rgb;
    s.rgb2 = &mesh.vertices[c].rgb;
    // Same expression as the per-pixel e0, evaluated at vertex 0, so that a
    // pixel center coinciding with a vertex gets exact barycentrics.
    s.area = edge(s.x1, s.y1, s.x2, s.y2, s.x0, s.y0);
    if (s.area == 0) continue;

    const double min_x = std::min({s.x0, s.x1, s.x2});
    const double max_x = std::max({s.x0, s.x1, s.x2});
    const double min_y = std::min({s.y0, s.y1, s.y2});
    const double max_y = std::max({s.y0, s.y1, s.y2});
    if (!std::isfinite(min_x) || !std::isfinite(max_x) ||
        !std::isfinite(min_y) || !std::isfinite(max_y)) {
      continue;
    }
    // Bounding box widened to match the coverage tolerance.
    s.min_px = std::max(0, int(std::ceil(min_x - 0.5 - 1e-6)));
    s.max_px = std::min(width - 1, int(std::floor(max_x - 0.5 + 1e-6)));
    s.min_py = std::max(0, int(std::ceil(min_y - 0.5 - 1e-6)));
    s.max_py = std::min(height - 1, int(std::floor(max_y - 0.5 + 1e-6)));
    if (s.min_px > s.max_px || s.min_py > s.max_py) continue;
    out.setups.push_back(s);
  }
  return out;
}

WarpOutput make_output(const CameraIntrinsics& camera,
                       const std::array<uint8_t, 3>& sentinel) {
  const int width = int(camera.width);
  const int height = int(camera.height);
  WarpOutput out;
  out.rgb = Image8(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = sentinel[c];
    }
  }
  out.mask = Mask(width, height);
  out.depth = DepthMap(width, height);
  return out;
}

WarpOutput rasterize_impl(const WarpMesh& mesh, const CameraIntrinsics& camera,
                          const Pose& pose,
                          const std::array<uint8_t, 3>& sentinel,
                          bool parallel) {
  const int width = int(camera.width);
  const int height = int(camera.height);
  WarpOutput out = make_output(camera, sentinel);

  Framebuffer fb;
  fb.width = width;
  fb.height = height;
  fb.zbuf.assign(size_t(width) * height, std::numeric_limits<double>::infinity());
  fb.rgb = &out.rgb;
  fb.mask = &out.mask;
  fb.depth = &out.depth;

  const ProjectedMesh projected = project_mesh(mesh, camera, pose, width, height);

  if (!parallel) {
    for (const TriangleSetup& t : projected.setups) {
      for (int py = t.min_py; py <= t.max_py; ++py) {
        for (int px = t.min_px; px <= t.max_px; ++px) {
          shade_pixel(t, px, py, fb);
        }
      }
    }
    return out;
  }

  // Rows own their pixels; binning preserves ascending triangle order per
  // row, so each pixel sees the same candidate sequence as the serial loop.
  std::vector<std::vector<uint32_t>> rows(height);
  for (uint32_t ti = 0; ti < projected.setups.size(); ++ti) {
    const TriangleSetup& t = projected.setups[ti];
    for (int py = t.min_py; py <= t.max_py; ++py) rows[py].push_back(ti);
  }

#pragma omp parallel for schedule(dynamic, 8)
  for (int py = 0; py < height; ++py) {
    for (uint32_t ti : rows[py]) {
      const TriangleSetup& t = projected.setups[ti];
      for (int px = t.min_px; px <= t.max_px; ++px) {
        shade_pixel(t, px, py, fb);
      }
    }
  }
  return out;
}

}  // namespace

WarpMesh build_mesh(const Image8& rgb, const DepthMap& depth,
                    const CameraIntrinsics& camera, const Pose& pose,
                    double discontinuity_threshold) {
  if (rgb.width != depth.width || rgb.height != depth.height) {
    throw std::invalid_argument("build_mesh: rgb and depth dimensions differ");
  }
  const int width = depth.width;
  const int height = depth.height;
  const bool filter = discontinuity_threshold >= 0;

  WarpMesh mesh;
  std::vector<int64_t> vertex_of(size_t(width) * height, -1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!depth.is_valid(x, y)) continue;
      vertex_of[depth.index(x, y)] = int64_t(mesh.vertices.size());
      WarpMesh::Vertex v;
      v.xyz = unproject(camera, pose, {x + 0.5, y + 0.5}, depth.at(x, y));
      v.rgb = {rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2)};
      mesh.vertices.push_back(v);
    }
  }

  const auto spread_ok = [&](double a, double b, double c) {
    if (!filter) return true;
    const double lo = std::min({a, b, c});
    const double hi = std::max({a, b, c});
    return (hi - lo) / lo <= discontinuity_threshold;
  };

  for (int y = 0; y + 1 < height; ++y) {
    for (int x = 0; x + 1 < width; ++x) {
      const int64_t v00 = vertex_of[depth.index(x, y)];
      const int64_t v10 = vertex_of[depth.index(x + 1, y)];
      const int64_t v01 = vertex_of[depth.index(x, y + 1)];
      const int64_t v11 = vertex_of[depth.index(x + 1, y + 1)];
      if (v00 < 0 || v10 < 0 || v01 < 0 || v11 < 0) continue;
      const double d00 = depth.at(x, y);
      const double d10 = depth.at(x + 1, y);
      const double d01 = depth.at(x, y + 1);
      const double d11 = depth.at(x + 1, y + 1);
      if (spread_ok(d00, d10, d11)) {
        mesh.triangles.push_back({uint32_t(v00), uint32_t(v10), uint32_t(v11)});
      }
      if (spread_ok(d00, d11, d01)) {
        mesh.triangles.push_back({uint32_t(v00), uint32_t(v11), uint32_t(v01)});
      }
    }
  }
  return mesh;
}

WarpOutput rasterize(const WarpMesh& mesh, const CameraIntrinsics& camera,
                     const Pose& pose,
                     const std::array<uint8_t, 3>& sentinel_rgb) {
  return rasterize_impl(mesh, camera, pose, sentinel_rgb, /*parallel=*/true);
}

WarpOutput rasterize_serial(const WarpMesh& mesh, const CameraIntrinsics& camera,
                            const Pose& pose,
                            const std::array<uint8_t, 3>& sentinel_rgb) {
  return rasterize_impl(mesh, camera, pose, sentinel_rgb, /*parallel=*/false);
}

WarpOutput warp(const Image8& ref_rgb, const DepthMap& aligned_depth,
                const CameraIntrinsics& ref_camera, const Pose& ref_pose,
                const CameraIntrinsics& tgt_camera, const Pose& tgt_pose,
                const WarpConfig& config) {
  if (aligned_depth.valid_count() == 0) {
    throw std::invalid_argument("warp: depth map has no valid pixels");
  }
  const WarpMesh mesh = build_mesh(ref_rgb, aligned_depth, ref_camera, ref_pose,
                                   config.discontinuity_threshold);
  return rasterize(mesh, tgt_camera, tgt_pose, config.sentinel_rgb);
}

}  // namespace viewprep
