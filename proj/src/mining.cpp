#include "viewprep/mining.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace viewprep {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
int64_t days_from_civil(int64_t y, int m, int d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int64_t yoe = y - era * 400;
  const int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

bool valid_date(int y, int m, int d) {
  if (y < 1000 || y > 9999 || m < 1 || m > 12 || d < 1) return false;
  static const int days_in_month[] = {31, 28, 31, 30, 31, 30,
                                      31, 31, 30, 31, 30, 31};
  int max_d = days_in_month[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) max_d = 29;
  return d <= max_d;
}

std::optional<int64_t> parse_timestamp_at(const std::string& text, size_t from) {
  static const std::regex pattern(
      R"((\d{4}):(\d{2}):(\d{2})[ T](\d{2}):(\d{2}):(\d{2}))");
  std::smatch m;
  std::string tail = text.substr(from);
  std::string::const_iterator begin = tail.cbegin();
  while (std::regex_search(begin, tail.cend(), m, pattern)) {
    const int y = std::stoi(m[1]);
    const int mo = std::stoi(m[2]);
    const int d = std::stoi(m[3]);
    const int hh = std::stoi(m[4]);
    const int mi = std::stoi(m[5]);
    const int ss = std::stoi(m[6]);
    if (valid_date(y, mo, d) && hh < 24 && mi < 60 && ss < 60) {
      return days_from_civil(y, mo, d) * 86400 + hh * 3600 + mi * 60 + ss;
    }
    begin = m[0].second;
  }
  return std::nullopt;
}

std::vector<double> positive_observation_depths(const SparseModel& model,
                                                const RegisteredImage& image) {
  std::vector<double> depths;
  for (const Observation& obs : image.points2d) {
    if (obs.point3d_id == kInvalidPoint3dId) continue;
    const double z = image.pose.apply(model.points.at(obs.point3d_id).xyz).z();
    if (z > 0) depths.push_back(z);
  }
  return depths;
}

}  // namespace

std::map<std::pair<int32_t, int32_t>, int64_t> covisibility_graph(
    const SparseModel& model) {
  std::map<std::pair<int32_t, int32_t>, int64_t> counts;
  std::vector<int32_t> observers;
  for (const auto& [pid, point] : model.points) {
    (void)pid;
    observers.clear();
    for (const TrackElement& t : point.track) observers.push_back(t.image_id);
    std::sort(observers.begin(), observers.end());
    observers.erase(std::unique(observers.begin(), observers.end()),
                    observers.end());
    for (size_t i = 0; i < observers.size(); ++i) {
      for (size_t j = i + 1; j < observers.size(); ++j) {
        ++counts[{observers[i], observers[j]}];
      }
    }
  }
  return counts;
}

std::optional<int64_t> parse_timestamp(const std::string& metadata_blob) {
  try {
    const size_t tag = metadata_blob.find("DateTimeOriginal");
    if (tag != std::string::npos) {
      if (auto t = parse_timestamp_at(metadata_blob, tag)) return t;
    }
    return parse_timestamp_at(metadata_blob, 0);
  } catch (...) {
    return std::nullopt;
  }
}

std::vector<PairRecord> mine_pairs(const SparseModel& model,
                                   const std::map<int32_t, ImageMeta>& metas,
                                   const MiningConfig& config,
                                   const std::string& scene_id) {
  for (const auto& [id, image] : model.images) {
    (void)image;
    if (!metas.count(id)) {
      fail("mine_pairs: no metadata for registered image " + std::to_string(id));
    }
  }

  const auto covis = covisibility_graph(model);

  // Reference-depth quantiles, computed once per image that needs one.
  std::map<int32_t, double> scale_of;
  const auto translation_scale = [&](int32_t image_id) -> std::optional<double> {
    const auto it = scale_of.find(image_id);
    if (it != scale_of.end()) return it->second > 0 ? std::optional(it->second)
                                                    : std::nullopt;
    const auto depths =
        positive_observation_depths(model, model.images.at(image_id));
    const double value =
        depths.empty() ? -1.0
                       : depth_quantile_scale(std::span<const double>(depths),
                                              config.quantile);
    scale_of[image_id] = value;
    return value > 0 ? std::optional(value) : std::nullopt;
  };

  std::vector<PairRecord> out;
  for (const auto& [pair, shared] : covis) {
    if (shared < config.min_shared) continue;
    const auto& meta_a = metas.at(pair.first);
    const auto& meta_b = metas.at(pair.second);

    // Unknown capture time cannot certify the lighting proxy.
    if (!meta_a.timestamp || !meta_b.timestamp) continue;
    const int64_t dt = std::abs(*meta_a.timestamp - *meta_b.timestamp);
    if (dt > config.max_dt) continue;

    const double ar_a = double(meta_a.width) / double(meta_a.height);
    const double ar_b = double(meta_b.width) / double(meta_b.height);
    if (std::abs(ar_a - ar_b) / std::max(ar_a, ar_b) > config.aspect_tol) {
      continue;
    }

    for (const auto& [ref, tgt] : {pair, std::pair{pair.second, pair.first}}) {
      const auto scale = translation_scale(ref);
      if (!scale) continue;  // reference sees no point in front of it
      PairRecord rec;
      rec.scene_id = scene_id;
      rec.ref_image_id = ref;
      rec.tgt_image_id = tgt;
      rec.shared_points = shared;
      rec.timestamp_delta = dt;
      rec.relative = relative_pose(model.images.at(ref).pose,
                                   model.images.at(tgt).pose);
      rec.translation_scale = *scale;
      rec.aspect_ratio = ref == pair.first ? ar_a : ar_b;
      out.push_back(std::move(rec));
    }
  }

  std::sort(out.begin(), out.end(), [](const PairRecord& a, const PairRecord& b) {
    return std::tie(a.ref_image_id, a.tgt_image_id) <
           std::tie(b.ref_image_id, b.tgt_image_id);
  });
  return out;
}

std::vector<PairRecord> mine_orbit_pairs(const SparseModel& model, int k,
                                         const MiningConfig& config,
                                         const std::string& scene_id) {
  const std::vector<int32_t> refs = sample_orbit_references(model, k);
  const auto covis = covisibility_graph(model);

  std::vector<PairRecord> out;
  for (const int32_t ref : refs) {
    const auto depths =
        positive_observation_depths(model, model.images.at(ref));
    if (depths.empty()) continue;
    const double scale = depth_quantile_scale(
        std::span<const double>(depths), config.quantile);

    for (const auto& [id, image] : model.images) {
      (void)image;
      if (id == ref) continue;
      const auto it = covis.find({std::min(ref, id), std::max(ref, id)});
      if (it == covis.end() || it->second < config.min_shared) continue;

      PairRecord rec;
      rec.scene_id = scene_id;
      rec.ref_image_id = ref;
      rec.tgt_image_id = id;
      rec.shared_points = it->second;
      rec.relative =
          relative_pose(model.images.at(ref).pose, model.images.at(id).pose);
      rec.translation_scale = scale;
      const auto& cam =
          model.cameras.at(model.images.at(ref).camera_id);
      rec.aspect_ratio = double(cam.width) / double(cam.height);
      out.push_back(std::move(rec));
    }
  }
  std::sort(out.begin(), out.end(), [](const PairRecord& a, const PairRecord& b) {
    return std::tie(a.ref_image_id, a.tgt_image_id) <
           std::tie(b.ref_image_id, b.tgt_image_id);
  });
  return out;
}

ResizePadResult resize_pad(const Image8& image, int target,
                           const std::array<uint8_t, 3>& pad_value) {
  if (target <= 0) throw std::invalid_argument("resize_pad: target must be > 0");
  if (image.width <= 0 || image.height <= 0) {
    throw std::invalid_argument("resize_pad: zero-dimension input");
  }

  const double scale = double(target) / double(std::max(image.width, image.height));
  int content_w, content_h;
  if (image.width >= image.height) {
    content_w = target;
    content_h = std::max<int>(1, int(std::lround(image.height * scale)));
  } else {
    content_h = target;
    content_w = std::max<int>(1, int(std::lround(image.width * scale)));
  }

  ResizePadResult result;
  result.placement.scale = scale;
  result.placement.offset_x = (target - content_w) / 2;
  result.placement.offset_y = (target - content_h) / 2;
  result.image = Image8(target, target);
  for (int y = 0; y < target; ++y) {
    for (int x = 0; x < target; ++x) {
      for (int c = 0; c < 3; ++c) result.image.at(x, y, c) = pad_value[c];
    }
  }

  const double sx = double(image.width) / double(content_w);
  const double sy = double(image.height) / double(content_h);
  for (int y = 0; y < content_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    const double fy = std::clamp(src_y, 0.0, double(image.height - 1));
    const int y0 = int(std::floor(fy));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < content_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      const double fx = std::clamp(src_x, 0.0, double(image.width - 1));
      const int x0 = int(std::floor(fx));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double v00 = image.at(x0, y0, c);
        const double v10 = image.at(x1, y0, c);
        const double v01 = image.at(x0, y1, c);
        const double v11 = image.at(x1, y1, c);
        const double value = (1 - wy) * ((1 - wx) * v00 + wx * v10) +
                             wy * ((1 - wx) * v01 + wx * v11);
        result.image.at(x + result.placement.offset_x,
                        y + result.placement.offset_y, c) =
            uint8_t(std::clamp<long>(std::lround(value), 0, 255));
      }
    }
  }
  return result;
}

std::vector<PairRecord> filter_pairs_by_score(
    const std::vector<PairRecord>& pairs,
    const std::map<PairScoreKey, double>& scores, double threshold) {
  std::vector<PairRecord> out;
  for (const PairRecord& pair : pairs) {
    const auto it =
        scores.find({pair.scene_id, pair.ref_image_id, pair.tgt_image_id});
    if (it == scores.end()) {
      fail("filter_pairs_by_score: no score for pair " + pair.scene_id + ":" +
           std::to_string(pair.ref_image_id) + "-" +
           std::to_string(pair.tgt_image_id));
    }
    if (it->second >= threshold) out.push_back(pair);
  }
  return out;
}

SplitResult split_holdout(const std::vector<PairRecord>& pairs,
                          const SplitConfig& config) {
  std::set<std::string> scene_set;
  for (const PairRecord& pair : pairs) scene_set.insert(pair.scene_id);
  std::vector<std::string> scenes(scene_set.begin(), scene_set.end());
  if (config.holdout_scenes < 0 ||
      size_t(config.holdout_scenes) > scenes.size()) {
    fail("split_holdout: holdout_scenes exceeds available scenes");
  }

  // Explicit Fisher-Yates so the selection depends only on the seed.
  std::mt19937_64 rng(config.seed);
  for (size_t i = scenes.size(); i > 1; --i) {
    std::swap(scenes[i - 1], scenes[rng() % i]);
  }
  const std::set<std::string> holdout(scenes.begin(),
                                      scenes.begin() + config.holdout_scenes);

  SplitResult result;
  std::vector<PairRecord> held;
  for (const PairRecord& pair : pairs) {
    (holdout.count(pair.scene_id) ? held : result.train).push_back(pair);
  }
  std::stable_sort(held.begin(), held.end(),
                   [](const PairRecord& a, const PairRecord& b) {
                     return std::tie(a.scene_id, a.ref_image_id, a.tgt_image_id) <
                            std::tie(b.scene_id, b.ref_image_id, b.tgt_image_id);
                   });
  for (size_t i = 0; i < held.size(); ++i) {
    (int64_t(i) < config.val_pairs ? result.val : result.test)
        .push_back(held[i]);
  }
  return result;
}

void write_pairs(const std::vector<PairRecord>& pairs,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("unwritable path: " + path.string());
  out << "# scene_id\tref_image_id\ttgt_image_id\tshared_points\t"
         "timestamp_delta\tqw\tqx\tqy\tqz\ttx\tty\ttz\ttranslation_scale\t"
         "aspect_ratio\n";
  for (const PairRecord& p : pairs) {
    out << p.scene_id << '\t' << p.ref_image_id << '\t' << p.tgt_image_id
        << '\t' << p.shared_points << '\t';
    if (p.timestamp_delta) {
      out << *p.timestamp_delta;
    } else {
      out << '-';
    }
    const auto& q = p.relative.rotation;
    const auto& t = p.relative.translation;
    out << '\t' << format_double(q.w()) << '\t' << format_double(q.x()) << '\t'
        << format_double(q.y()) << '\t' << format_double(q.z()) << '\t'
        << format_double(t.x()) << '\t' << format_double(t.y()) << '\t'
        << format_double(t.z()) << '\t' << format_double(p.translation_scale)
        << '\t' << format_double(p.aspect_ratio) << '\n';
  }
}

std::vector<PairRecord> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("missing pair file: " + path.string());
  std::vector<PairRecord> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    PairRecord p;
    std::string dt;
    double qw, qx, qy, qz;
    if (!(ls >> p.scene_id >> p.ref_image_id >> p.tgt_image_id >>
          p.shared_points >> dt >> qw >> qx >> qy >> qz >>
          p.relative.translation.x() >> p.relative.translation.y() >>
          p.relative.translation.z() >> p.translation_scale >>
          p.aspect_ratio)) {
      fail("malformed pair line: " + line);
    }
    p.relative.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
    if (dt != "-") p.timestamp_delta = std::stoll(dt);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::map<int32_t, ImageMeta> read_meta_manifest(
    const std::filesystem::path& path, const SparseModel& model) {
  std::ifstream in(path);
  if (!in) fail("missing metadata manifest: " + path.string());

  std::map<std::string, int32_t> id_of_name;
  for (const auto& [id, image] : model.images) id_of_name[image.name] = id;

  std::map<int32_t, ImageMeta> metas;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ImageMeta meta;
    std::string datetime;
    if (!(ls >> meta.name >> meta.width >> meta.height)) {
      fail("malformed metadata line: " + line);
    }
    std::getline(ls, datetime);  // remainder may contain spaces
    if (meta.width == 0 || meta.height == 0) {
      fail("zero image dimension in metadata line: " + line);
    }
    meta.timestamp = parse_timestamp(datetime);
    const auto it = id_of_name.find(meta.name);
    if (it != id_of_name.end()) metas[it->second] = std::move(meta);
  }
  return metas;
}

std::vector<std::string> read_exclusion_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("missing exclusion list: " + path.string());
  std::vector<std::string> scenes;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    scenes.push_back(line);
  }
  return scenes;
}

}  // namespace viewprep
