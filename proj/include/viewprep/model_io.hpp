#pragma once

#include <filesystem>
#include <string>

#include "viewprep/sparse_model.hpp"

namespace viewprep {

enum class ModelFormat { kBinary, kText, kAuto };

struct ParseOptions {
  // With lenient set, dangling cross-references are repaired instead of
  // raising; the repair counters end up in SparseModel::repair's report.
  bool lenient = false;
};

// Reads cameras/images/points3D.{bin|txt} from `dir`. kAuto picks whichever
// complete file set is present (binary preferred when both exist).
SparseModel parse_model(const std::filesystem::path& dir,
                        ModelFormat format = ModelFormat::kAuto,
                        const ParseOptions& options = {});

// Writes the three model files. Output is deterministic: entities are
// emitted in ascending id order, text floats with 17 significant digits.
void write_model(const SparseModel& model, const std::filesystem::path& dir,
                 ModelFormat format);

// Keypoint text format: header "W H N" followed by N lines "x y".
KeypointSet read_keypoints(const std::filesystem::path& path);
void write_keypoints(const KeypointSet& kps, const std::filesystem::path& path);

}  // namespace viewprep
