#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace viewprep {

// Every tunable of the pipeline with its default. Loaded from a flat
// key=value file; unknown keys are rejected. CLI flags override file values.
struct PipelineConfig {
  // pair mining
  int64_t min_shared = 50;
  int64_t max_dt = 10800;
  double aspect_tol = 0.01;
  double quantile = 0.2;
  int target_size = 256;
  double score_threshold = 0.8;

  // splits
  int holdout_scenes = 800;
  int64_t val_pairs = 10000;

  // depth alignment
  int ransac_iterations = 1000;
  double inlier_threshold = 0.05;
  int min_inliers = 0;  // 0 selects max(10, 20% of correspondences)
  bool scale_only = false;
  bool invert_input = false;

  // warping
  double discontinuity_threshold = 0.1;
  std::array<uint8_t, 3> sentinel_rgb = {0, 0, 0};

  // metrics
  double psnr_cap = 100.0;

  // keypoint masking
  double border_fraction = 0.05;
  double watermark_threshold = 0.10;

  // crawler
  int max_depth = 4;
  std::string user_agent = "viewprep/0.1 (data curation tool)";
  int max_retries = 5;
  int max_concurrent_requests = 2;

  // shared
  uint64_t seed = 0;
  int jobs = 0;  // 0 = library default
  std::string cache_dir;

  // Parses key=value lines ('#' comments); throws std::invalid_argument on
  // unknown keys or unparseable values.
  void load(const std::filesystem::path& path);

  // One key=value line per field, in declaration order.
  std::string dump() const;
};

// Tiny key=value record writer/reader used for per-pair warp metadata.
struct KeyValueRecord {
  std::vector<std::pair<std::string, std::string>> items;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::string get(const std::string& key) const;  // throws if absent
  double get_double(const std::string& key) const;

  void save(const std::filesystem::path& path) const;
  static KeyValueRecord load_file(const std::filesystem::path& path);
};

}  // namespace viewprep
