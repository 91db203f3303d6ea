#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viewprep/geometry.hpp"
#include "viewprep/image.hpp"
#include "viewprep/sparse_model.hpp"

namespace viewprep {

struct PairRecord {
  std::string scene_id;
  int32_t ref_image_id = -1;
  int32_t tgt_image_id = -1;
  int64_t shared_points = 0;
  std::optional<int64_t> timestamp_delta;  // seconds
  RelativePose relative;
  double translation_scale = 0;  // 20th-quantile reference depth
  double aspect_ratio = 0;
};

struct ImageMeta {
  std::string name;
  std::optional<int64_t> timestamp;  // UTC seconds
  uint64_t width = 0;
  uint64_t height = 0;
};

// Shared-3D-point counts for every unordered image pair with overlap; keys
// are (low id, high id). Single-threaded; models are small relative to the
// per-pair work downstream.
std::map<std::pair<int32_t, int32_t>, int64_t> covisibility_graph(
    const SparseModel& model);

// Extracts a capture time from DateTimeOriginal-style metadata text
// ("YYYY:MM:DD HH:MM:SS", 'T' separator also accepted). Returns the value
// following a DateTimeOriginal tag when one exists, otherwise the first
// well-formed timestamp. Never throws; absence or malformed input gives
// nullopt. Naive timestamps are interpreted as UTC.
std::optional<int64_t> parse_timestamp(const std::string& metadata_blob);

struct MiningConfig {
  int64_t min_shared = 50;
  int64_t max_dt = 10800;  // seconds; three hours
  double aspect_tol = 0.01;
  double quantile = 0.2;
};

// Emits ordered pairs (both directions) passing all three filters: shared
// points, capture-time proximity, and matching aspect ratio. Each record
// carries the relative pose and the nearest-rank depth quantile of the
// reference image's sparse SfM depths. Throws when a registered image has
// no metadata entry.
std::vector<PairRecord> mine_pairs(const SparseModel& model,
                                   const std::map<int32_t, ImageMeta>& metas,
                                   const MiningConfig& config,
                                   const std::string& scene_id);

// Evaluation-style orbit pairing: k evenly spaced reference views from the
// horizontal viewing-angle sort, each paired (one direction) with every
// image sharing at least min_shared points. No capture-time or aspect
// filters; gravity-align the model first.
std::vector<PairRecord> mine_orbit_pairs(const SparseModel& model, int k,
                                         const MiningConfig& config,
                                         const std::string& scene_id);

struct Placement {
  double scale = 1.0;
  int offset_x = 0;
  int offset_y = 0;
};

struct ResizePadResult {
  Image8 image;
  Placement placement;
};

// Scales the long side to `target` (bilinear), keeps aspect, centers the
// content, fills the rest with pad_value.
ResizePadResult resize_pad(const Image8& image, int target,
                           const std::array<uint8_t, 3>& pad_value = {0, 0, 0});

using PairScoreKey = std::tuple<std::string, int32_t, int32_t>;

// Keeps exactly the pairs with score >= threshold. Missing scores are an
// error.
std::vector<PairRecord> filter_pairs_by_score(
    const std::vector<PairRecord>& pairs,
    const std::map<PairScoreKey, double>& scores, double threshold);

struct SplitConfig {
  int holdout_scenes = 800;
  int64_t val_pairs = 10000;
  uint64_t seed = 0;
};

struct SplitResult {
  std::vector<PairRecord> train;
  std::vector<PairRecord> val;
  std::vector<PairRecord> test;
};

// Seeded holdout-scene selection; within the holdout, pairs ordered by
// (scene id, ref id, tgt id), the first val_pairs form validation and the
// remainder test.
SplitResult split_holdout(const std::vector<PairRecord>& pairs,
                          const SplitConfig& config);

// Tab-separated pair list with one documented header line.
void write_pairs(const std::vector<PairRecord>& pairs,
                 const std::filesystem::path& path);
std::vector<PairRecord> read_pairs(const std::filesystem::path& path);

// Image metadata manifest: "name <tab> width <tab> height <tab> datetime"
// per line ('-' for an absent timestamp); '#' lines are comments. Keys are
// resolved against the model's image names.
std::map<int32_t, ImageMeta> read_meta_manifest(
    const std::filesystem::path& path, const SparseModel& model);

// Plain text, one scene id per line.
std::vector<std::string> read_exclusion_list(const std::filesystem::path& path);

}  // namespace viewprep
