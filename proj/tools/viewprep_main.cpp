#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "viewprep/config.hpp"
#include "viewprep/crawl/fixture_source.hpp"
#include "viewprep/crawl/live_source.hpp"
#include "viewprep/crawl/ops.hpp"
#include "viewprep/depth_align.hpp"
#include "viewprep/depth_io.hpp"
#include "viewprep/geometry.hpp"
#include "viewprep/image.hpp"
#include "viewprep/metrics.hpp"
#include "viewprep/mining.hpp"
#include "viewprep/model_io.hpp"
#include "viewprep/warp.hpp"

namespace fs = std::filesystem;
using namespace viewprep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

// Non-canonical defaults; override with --glam-file / --keywords-file.
const std::set<std::string> kDefaultGlamClasses = {
    "museum", "art museum", "gallery", "art gallery",
    "library", "archive",    "archives"};

const std::vector<std::string> kDefaultExcludedKeywords = {
    "People associated with", "People of",   "Births in", "Deaths in",
    "Maps of",                "Documents of", "Postcards", "Paintings of",
    "Drawings of",            "Books about"};

struct GlobalArgs {
  PipelineConfig cfg;
  bool dry_run = false;
};

void log_item(const std::string& line) { std::cerr << line << "\n"; }

std::set<std::string> load_word_set(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing data file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

std::vector<std::string> load_word_list(const fs::path& path) {
  const auto words = load_word_set(path);
  return {words.begin(), words.end()};
}

ModelFormat parse_format(const std::string& name) {
  if (name == "auto") return ModelFormat::kAuto;
  if (name == "binary") return ModelFormat::kBinary;
  if (name == "text") return ModelFormat::kText;
  throw CLI::ValidationError("--format must be auto, binary, or text");
}

std::string stem_of(const SparseModel& model, int32_t image_id) {
  return fs::path(model.images.at(image_id).name).stem().string();
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns a summary record printed to stdout.
// ---------------------------------------------------------------------------

struct ParseArgs {
  std::string model_dir, format = "auto", out_dir, out_format = "binary";
  bool lenient = false;
  bool gravity_align = false;
};

KeyValueRecord run_parse(const ParseArgs& args) {
  ParseOptions options{args.lenient};
  SparseModel model =
      parse_model(args.model_dir, parse_format(args.format), options);
  log_item("parsed model from " + args.model_dir);

  KeyValueRecord summary;
  summary.set("command", "parse");
  if (args.gravity_align) {
    GravityAlignment aligned = gravity_align(model);
    model = std::move(aligned.model);
    const auto& q = aligned.transform.rotation;
    summary.set("gravity_rotation",
                std::to_string(q.w()) + "," + std::to_string(q.x()) + "," +
                    std::to_string(q.y()) + "," + std::to_string(q.z()));
    log_item("gravity-aligned model");
  }
  if (!args.out_dir.empty()) {
    write_model(model, args.out_dir, parse_format(args.out_format));
    log_item("wrote model to " + args.out_dir);
  }
  summary.set("cameras", std::to_string(model.cameras.size()));
  summary.set("images", std::to_string(model.images.size()));
  summary.set("points", std::to_string(model.points.size()));
  return summary;
}

struct MaskKeypointsArgs {
  std::string input, output;
};

KeyValueRecord run_mask_keypoints(const MaskKeypointsArgs& args,
                                  const PipelineConfig& cfg) {
  const KeypointSet kps = read_keypoints(args.input);
  const KeypointSet masked = mask_border_keypoints(kps, cfg.border_fraction);
  write_keypoints(masked, args.output);
  log_item("masked " + std::to_string(kps.keypoints.size() - masked.keypoints.size()) +
           " of " + std::to_string(kps.keypoints.size()) + " keypoints");
  KeyValueRecord summary;
  summary.set("command", "mask-keypoints");
  summary.set("input_keypoints", std::to_string(kps.keypoints.size()));
  summary.set("kept_keypoints", std::to_string(masked.keypoints.size()));
  return summary;
}

struct MineArgs {
  std::string model_dir, meta_file, scene_id, out_file, exclude_file, scores_file;
  int orbit_k = 0;
};

KeyValueRecord run_mine(const MineArgs& args, const PipelineConfig& cfg) {
  KeyValueRecord summary;
  summary.set("command", "mine");

  if (!args.exclude_file.empty()) {
    const auto excluded = read_exclusion_list(args.exclude_file);
    if (std::find(excluded.begin(), excluded.end(), args.scene_id) !=
        excluded.end()) {
      log_item("scene " + args.scene_id + " is on the exclusion list");
      write_pairs({}, args.out_file);
      summary.set("pairs", "0");
      summary.set("excluded_scene", "true");
      return summary;
    }
  }

  const SparseModel model = parse_model(args.model_dir);
  MiningConfig mining{cfg.min_shared, cfg.max_dt, cfg.aspect_tol, cfg.quantile};

  std::vector<PairRecord> pairs;
  if (args.orbit_k > 0) {
    pairs = mine_orbit_pairs(model, args.orbit_k, mining, args.scene_id);
  } else {
    if (args.meta_file.empty()) {
      throw std::invalid_argument("mine requires --meta (or --orbit-k)");
    }
    const auto metas = read_meta_manifest(args.meta_file, model);
    pairs = mine_pairs(model, metas, mining, args.scene_id);
  }

  if (!args.scores_file.empty()) {
    std::map<PairScoreKey, double> scores;
    std::ifstream in(args.scores_file);
    if (!in) throw std::runtime_error("missing scores file: " + args.scores_file);
    std::string scene;
    int32_t ref, tgt;
    double score;
    while (in >> scene >> ref >> tgt >> score) {
      scores[{scene, ref, tgt}] = score;
    }
    pairs = filter_pairs_by_score(pairs, scores, cfg.score_threshold);
  }

  write_pairs(pairs, args.out_file);
  log_item("mined " + std::to_string(pairs.size()) + " pairs");
  summary.set("pairs", std::to_string(pairs.size()));
  return summary;
}

struct AlignArgs {
  std::string model_dir, image, mono_file, out_file, params_file;
  std::string mono_dir, out_dir;
};

AlignmentResult align_one(const SparseModel& model, int32_t image_id,
                          const fs::path& mono_path, const fs::path& out_path,
                          const fs::path& params_path,
                          const PipelineConfig& cfg) {
  DepthMap mono = read_depth(mono_path);
  if (cfg.invert_input) mono = invert_depth(mono);
  const SparseDepth sparse = sparse_depth_for_image(model, image_id);
  RansacParams params;
  params.iterations = cfg.ransac_iterations;
  params.inlier_threshold = cfg.inlier_threshold;
  params.min_inliers = cfg.min_inliers;
  params.seed = cfg.seed;
  params.scale_only = cfg.scale_only;
  const AlignmentResult result = ransac_align(mono, sparse, params);
  write_depth(apply_alignment(mono, result), out_path);

  KeyValueRecord record;
  record.set("image_id", std::to_string(image_id));
  record.set("scale", result.scale);
  record.set("shift", result.shift);
  record.set("inliers", std::to_string(result.inlier_count));
  record.set("residual_rms", result.residual_rms);
  record.save(params_path);
  return result;
}

KeyValueRecord run_align(const AlignArgs& args, const PipelineConfig& cfg) {
  const SparseModel model = parse_model(args.model_dir);
  KeyValueRecord summary;
  summary.set("command", "align");

  if (!args.mono_dir.empty()) {
    fs::create_directories(args.out_dir);
    std::vector<int32_t> ids;
    for (const auto& [id, image] : model.images) {
      (void)image;
      if (fs::exists(fs::path(args.mono_dir) / (stem_of(model, id) + ".pfm"))) {
        ids.push_back(id);
      }
    }
    size_t aligned = 0;
    for (int32_t id : ids) {
      const std::string stem = stem_of(model, id);
      const auto result = align_one(
          model, id, fs::path(args.mono_dir) / (stem + ".pfm"),
          fs::path(args.out_dir) / (stem + ".aligned.pfm"),
          fs::path(args.out_dir) / (stem + ".align.meta"), cfg);
      log_item("aligned image " + std::to_string(id) + " scale=" +
               std::to_string(result.scale) + " shift=" +
               std::to_string(result.shift));
      ++aligned;
    }
    summary.set("aligned_images", std::to_string(aligned));
    return summary;
  }

  // Single image: accept an id or a name.
  int32_t image_id = -1;
  try {
    image_id = std::stoi(args.image);
  } catch (...) {
    for (const auto& [id, image] : model.images) {
      if (image.name == args.image) image_id = id;
    }
  }
  if (!model.images.count(image_id)) {
    throw std::runtime_error("no registered image '" + args.image + "'");
  }
  const fs::path params_path = args.params_file.empty()
                                   ? fs::path(args.out_file + ".meta")
                                   : fs::path(args.params_file);
  const auto result = align_one(model, image_id, args.mono_file, args.out_file,
                                params_path, cfg);
  summary.set("image_id", std::to_string(image_id));
  summary.set("scale", result.scale);
  summary.set("shift", result.shift);
  summary.set("inliers", std::to_string(result.inlier_count));
  return summary;
}

struct WarpArgs {
  std::string model_dir, pairs_file, rgb_dir, depth_dir, out_dir;
};

KeyValueRecord run_warp(const WarpArgs& args, const PipelineConfig& cfg) {
  const SparseModel model = parse_model(args.model_dir);
  const auto pairs = read_pairs(args.pairs_file);
  fs::create_directories(args.out_dir);

  WarpConfig warp_cfg;
  warp_cfg.discontinuity_threshold = cfg.discontinuity_threshold;
  warp_cfg.sentinel_rgb = cfg.sentinel_rgb;

  std::vector<std::string> logs(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < (long long)pairs.size(); ++i) {
    const PairRecord& pair = pairs[i];
    const RegisteredImage& ref = model.images.at(pair.ref_image_id);
    const RegisteredImage& tgt = model.images.at(pair.tgt_image_id);
    const std::string ref_stem = stem_of(model, pair.ref_image_id);
    const std::string tgt_stem = stem_of(model, pair.tgt_image_id);

    const Image8 rgb = read_png_rgb(fs::path(args.rgb_dir) / (ref_stem + ".png"));
    const DepthMap depth =
        read_depth(fs::path(args.depth_dir) / (ref_stem + ".aligned.pfm"));

    const WarpOutput out =
        warp(rgb, depth, model.cameras.at(ref.camera_id), ref.pose,
             model.cameras.at(tgt.camera_id), tgt.pose, warp_cfg);

    const std::string base = ref_stem + "_" + tgt_stem;
    write_png_rgb(out.rgb, fs::path(args.out_dir) / (base + ".rgb.png"));
    write_png_mask(out.mask, fs::path(args.out_dir) / (base + ".mask.png"));
    write_pfm(out.depth, fs::path(args.out_dir) / (base + ".depth.pfm"));

    KeyValueRecord meta;
    meta.set("ref_image_id", std::to_string(pair.ref_image_id));
    meta.set("tgt_image_id", std::to_string(pair.tgt_image_id));
    meta.set("discontinuity_threshold", cfg.discontinuity_threshold);
    meta.set("translation_scale", pair.translation_scale);
    const auto& q = pair.relative.rotation;
    const auto& t = pair.relative.translation;
    meta.set("relative_q", std::to_string(q.w()) + "," + std::to_string(q.x()) +
                               "," + std::to_string(q.y()) + "," +
                               std::to_string(q.z()));
    meta.set("relative_t", std::to_string(t.x()) + "," + std::to_string(t.y()) +
                               "," + std::to_string(t.z()));
    // Pose-conditioning vector: flattened 3x4 relative extrinsic with the
    // translation scaled by the reference depth quantile, then the target
    // vertical fov.
    const ConditioningVector cv = build_conditioning(
        pair.relative, model.cameras.at(tgt.camera_id).vertical_fov(),
        pair.translation_scale);
    std::string cv_text;
    for (size_t v = 0; v < cv.size(); ++v) {
      if (v) cv_text += ",";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", cv[v]);
      cv_text += buf;
    }
    meta.set("conditioning", cv_text);
    meta.set("mask_coverage", out.mask.coverage());
    meta.save(fs::path(args.out_dir) / (base + ".meta"));
    logs[i] = "warped " + base + " coverage=" + std::to_string(out.mask.coverage());
  }
  for (const std::string& line : logs) log_item(line);

  KeyValueRecord summary;
  summary.set("command", "warp");
  summary.set("pairs", std::to_string(pairs.size()));
  return summary;
}

struct EvalArgs {
  std::string pairs_file, gen_dir, target_dir, warp_dir, out_file;
  std::string model_dir;  // for image names
  std::string external_file;
};

KeyValueRecord run_eval(const EvalArgs& args, const PipelineConfig& cfg) {
  (void)cfg;
  const SparseModel model = parse_model(args.model_dir);
  const auto pairs = read_pairs(args.pairs_file);

  std::vector<MetricReport> reports(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < (long long)pairs.size(); ++i) {
    const PairRecord& pair = pairs[i];
    const std::string ref_stem = stem_of(model, pair.ref_image_id);
    const std::string tgt_stem = stem_of(model, pair.tgt_image_id);
    const std::string base = ref_stem + "_" + tgt_stem;

    const Image8 gen = read_png_rgb(fs::path(args.gen_dir) / (base + ".png"));
    const Image8 target =
        read_png_rgb(fs::path(args.target_dir) / (tgt_stem + ".png"));
    WarpOutput w;
    w.rgb = read_png_rgb(fs::path(args.warp_dir) / (base + ".rgb.png"));
    w.mask = read_png_mask(fs::path(args.warp_dir) / (base + ".mask.png"));
    w.depth = read_pfm(fs::path(args.warp_dir) / (base + ".depth.pfm"));
    reports[i] = report(gen, target, w);
  }

  std::ofstream out(args.out_file);
  if (!out) throw std::runtime_error("unwritable path: " + args.out_file);
  out << "# scene_id\tref\ttgt\tpsnr\tssim\tmasked_psnr\tmasked_ssim\t"
         "coverage\n";
  double sum_psnr = 0, sum_ssim = 0, sum_mpsnr = 0, sum_mssim = 0, sum_cov = 0;
  size_t masked_count = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const MetricReport& r = reports[i];
    out << pairs[i].scene_id << '\t' << pairs[i].ref_image_id << '\t'
        << pairs[i].tgt_image_id << '\t' << r.psnr << '\t' << r.ssim << '\t';
    if (r.masked_psnr) out << *r.masked_psnr;
    else out << '-';
    out << '\t';
    if (r.masked_ssim) out << *r.masked_ssim;
    else out << '-';
    out << '\t' << r.mask_coverage << '\n';
    sum_psnr += r.psnr;
    sum_ssim += r.ssim;
    sum_cov += r.mask_coverage;
    if (r.masked_psnr && r.masked_ssim) {
      sum_mpsnr += *r.masked_psnr;
      sum_mssim += *r.masked_ssim;
      ++masked_count;
    }
    log_item("evaluated pair " + std::to_string(pairs[i].ref_image_id) + "->" +
             std::to_string(pairs[i].tgt_image_id));
  }

  const double n = double(std::max<size_t>(1, pairs.size()));
  const double mn = double(std::max<size_t>(1, masked_count));

  // Slots for externally computed neural metrics, merged when provided.
  std::string lpips = "-", fid = "-", kid = "-";
  if (!args.external_file.empty()) {
    const auto ext = KeyValueRecord::load_file(args.external_file);
    for (const auto& [k, v] : ext.items) {
      if (k == "lpips") lpips = v;
      if (k == "fid") fid = v;
      if (k == "kid") kid = v;
    }
  }

  std::cout << "metric            \tvalue\n"
            << "LPIPS             \t" << lpips << "\n"
            << "PSNR              \t" << sum_psnr / n << "\n"
            << "SSIM              \t" << sum_ssim / n << "\n"
            << "Masked PSNR       \t" << sum_mpsnr / mn << "\n"
            << "Masked SSIM       \t" << sum_mssim / mn << "\n"
            << "FID               \t" << fid << "\n"
            << "KID               \t" << kid << "\n"
            << "mask coverage mean\t" << sum_cov / n << "\n";

  KeyValueRecord summary;
  summary.set("command", "eval");
  summary.set("pairs", std::to_string(pairs.size()));
  summary.set("mean_psnr", sum_psnr / n);
  summary.set("mean_ssim", sum_ssim / n);
  summary.set("mean_masked_psnr", sum_mpsnr / mn);
  summary.set("mean_masked_ssim", sum_mssim / mn);
  return summary;
}

struct SplitArgs {
  std::string pairs_file, out_prefix;
};

KeyValueRecord run_split(const SplitArgs& args, const PipelineConfig& cfg) {
  const auto pairs = read_pairs(args.pairs_file);
  SplitConfig split_cfg{cfg.holdout_scenes, cfg.val_pairs, cfg.seed};
  const SplitResult result = split_holdout(pairs, split_cfg);
  write_pairs(result.train, args.out_prefix + ".train.tsv");
  write_pairs(result.val, args.out_prefix + ".val.tsv");
  write_pairs(result.test, args.out_prefix + ".test.tsv");
  log_item("split " + std::to_string(pairs.size()) + " pairs");
  KeyValueRecord summary;
  summary.set("command", "split");
  summary.set("train", std::to_string(result.train.size()));
  summary.set("val", std::to_string(result.val.size()));
  summary.set("test", std::to_string(result.test.size()));
  return summary;
}

struct CrawlArgs {
  std::string fixture_dir;
  bool live = false;
  std::string classes_csv;      // identify
  std::string glam_file;        // identify
  std::string scene, entity;    // manifest
  std::string keywords_file;    // manifest
  std::string out_file;
  std::string fetch_manifest, fetch_dir;  // fetch
};

std::unique_ptr<crawl::SceneSource> make_source(const CrawlArgs& args,
                                                const PipelineConfig& cfg) {
  if (!args.fixture_dir.empty()) {
    return std::make_unique<crawl::FixtureSource>(args.fixture_dir);
  }
  if (!args.live) {
    throw std::runtime_error("pass --fixture-dir DIR or --live");
  }
  crawl::LiveConfig live;
  live.user_agent = cfg.user_agent;
  live.max_retries = cfg.max_retries;
  live.max_concurrent_requests = cfg.max_concurrent_requests;
  live.cache_dir = cfg.cache_dir;
  return std::make_unique<crawl::LiveSource>(live);
}

KeyValueRecord run_identify(const CrawlArgs& args, const PipelineConfig& cfg) {
  auto source = make_source(args, cfg);

  std::vector<std::string> class_ids;
  std::istringstream csv(args.classes_csv);
  std::string id;
  while (std::getline(csv, id, ',')) {
    if (!id.empty()) class_ids.push_back(id);
  }

  const std::set<std::string> glam = args.glam_file.empty()
                                         ? kDefaultGlamClasses
                                         : load_word_set(args.glam_file);

  auto scenes = crawl::identify_scenes(class_ids, *source);
  const size_t identified = scenes.size();
  scenes = crawl::cyclic_link_filter(scenes, *source);
  const size_t after_cyclic = scenes.size();
  scenes = crawl::glam_filter(scenes, *source, glam);
  for (const auto& scene : scenes) log_item("scene: " + scene.commons_category);

  const std::string serialized = crawl::serialize_scenes(scenes);
  if (!args.out_file.empty()) {
    std::ofstream out(args.out_file);
    out << serialized;
  } else {
    std::cout << serialized;
  }

  KeyValueRecord summary;
  summary.set("command", "identify");
  summary.set("identified", std::to_string(identified));
  summary.set("after_cyclic_filter", std::to_string(after_cyclic));
  summary.set("after_glam_filter", std::to_string(scenes.size()));
  return summary;
}

KeyValueRecord run_manifest(const CrawlArgs& args, const PipelineConfig& cfg) {
  auto source = make_source(args, cfg);

  crawl::SceneCategory scene;
  scene.commons_category = args.scene;
  scene.entity_id = args.entity;

  const std::vector<std::string> keywords =
      args.keywords_file.empty() ? kDefaultExcludedKeywords
                                 : load_word_list(args.keywords_file);
  const auto rules =
      crawl::default_rules_for(scene, *source, keywords, cfg.max_depth);
  const auto tree = crawl::recurse_subcategories(scene, *source, rules);
  const auto manifest = crawl::build_manifest(tree, *source);
  for (const auto& entry : manifest.entries) log_item("file: " + entry.title);

  const std::string serialized = crawl::serialize_manifest(manifest);
  if (!args.out_file.empty()) {
    std::ofstream out(args.out_file);
    out << serialized;
  } else {
    std::cout << serialized;
  }

  KeyValueRecord summary;
  summary.set("command", "manifest");
  summary.set("entries", std::to_string(manifest.entries.size()));
  summary.set("excluded_unlicensed",
              std::to_string(manifest.excluded_unlicensed.size()));
  return summary;
}

KeyValueRecord run_fetch(const CrawlArgs& args, const PipelineConfig& cfg) {
  // Thin manifest consumer; rate-limited mirroring stays out of scope.
  std::ifstream in(args.fetch_manifest);
  if (!in) throw std::runtime_error("missing manifest: " + args.fetch_manifest);
  fs::create_directories(args.fetch_dir);

  size_t fetched = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string title, url;
    std::getline(ls, title, '\t');
    std::getline(ls, url, '\t');
    if (url.empty()) continue;

    const auto body = crawl::fetch_url(url, cfg.user_agent);
    if (!body) {
      log_item("fetch failed: " + url);
      continue;
    }
    const std::string name = fs::path(title).filename().string();
    std::ofstream out(fs::path(args.fetch_dir) / name, std::ios::binary);
    out << *body;
    log_item("fetched " + name);
    ++fetched;
  }

  KeyValueRecord summary;
  summary.set("command", "fetch");
  summary.set("fetched", std::to_string(fetched));
  return summary;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalArgs global;

  // --config is honored before the flag pass so explicit flags win.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc) {
        global.cfg.load(argv[i + 1]);
      } else if (arg.rfind("--config=", 0) == 0) {
        global.cfg.load(arg.substr(9));
      }
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }

  CLI::App app{"SfM-to-view-synthesis data preparation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file");
  app.add_flag("--dry-run", global.dry_run,
               "print the resolved config and planned work, write nothing");
  app.add_option("--seed", global.cfg.seed, "RNG seed for randomized stages");
  app.add_option("--jobs", global.cfg.jobs, "worker threads for batch stages");

  ParseArgs parse_args;
  auto* cmd_parse = app.add_subcommand("parse", "read/convert a sparse model");
  cmd_parse->add_option("--model", parse_args.model_dir)->required();
  cmd_parse->add_option("--format", parse_args.format);
  cmd_parse->add_flag("--lenient", parse_args.lenient);
  cmd_parse->add_flag("--gravity-align", parse_args.gravity_align,
                      "rotate the model so the mean camera down-axis is -z");
  cmd_parse->add_option("--out", parse_args.out_dir);
  cmd_parse->add_option("--out-format", parse_args.out_format);

  MaskKeypointsArgs mask_args;
  auto* cmd_mask = app.add_subcommand("mask-keypoints",
                                      "drop keypoints near the image border");
  cmd_mask->add_option("--input", mask_args.input)->required();
  cmd_mask->add_option("--output", mask_args.output)->required();
  cmd_mask->add_option("--border-fraction", global.cfg.border_fraction);

  MineArgs mine_args;
  auto* cmd_mine = app.add_subcommand("mine", "mine covisible image pairs");
  cmd_mine->add_option("--model", mine_args.model_dir)->required();
  cmd_mine->add_option("--meta", mine_args.meta_file);
  cmd_mine->add_option("--orbit-k", mine_args.orbit_k,
                       "orbit-reference evaluation pairing instead of the "
                       "metadata filters");
  cmd_mine->add_option("--scene", mine_args.scene_id)->required();
  cmd_mine->add_option("--out", mine_args.out_file)->required();
  cmd_mine->add_option("--exclude", mine_args.exclude_file);
  cmd_mine->add_option("--scores", mine_args.scores_file);
  cmd_mine->add_option("--min-shared", global.cfg.min_shared);
  cmd_mine->add_option("--max-dt", global.cfg.max_dt);
  cmd_mine->add_option("--aspect-tol", global.cfg.aspect_tol);
  cmd_mine->add_option("--quantile", global.cfg.quantile);
  cmd_mine->add_option("--score-threshold", global.cfg.score_threshold);

  AlignArgs align_args;
  auto* cmd_align = app.add_subcommand("align", "fit monocular depth to SfM depth");
  cmd_align->add_option("--model", align_args.model_dir)->required();
  cmd_align->add_option("--image", align_args.image);
  cmd_align->add_option("--mono", align_args.mono_file);
  cmd_align->add_option("--out", align_args.out_file);
  cmd_align->add_option("--params", align_args.params_file);
  cmd_align->add_option("--mono-dir", align_args.mono_dir);
  cmd_align->add_option("--out-dir", align_args.out_dir);
  cmd_align->add_option("--iterations", global.cfg.ransac_iterations);
  cmd_align->add_option("--inlier-threshold", global.cfg.inlier_threshold);
  cmd_align->add_option("--min-inliers", global.cfg.min_inliers);
  cmd_align->add_flag("--scale-only", global.cfg.scale_only);
  cmd_align->add_flag("--invert-input", global.cfg.invert_input);

  WarpArgs warp_args;
  auto* cmd_warp = app.add_subcommand("warp", "render depth-based warps");
  cmd_warp->add_option("--model", warp_args.model_dir)->required();
  cmd_warp->add_option("--pairs", warp_args.pairs_file)->required();
  cmd_warp->add_option("--rgb-dir", warp_args.rgb_dir)->required();
  cmd_warp->add_option("--depth-dir", warp_args.depth_dir)->required();
  cmd_warp->add_option("--out-dir", warp_args.out_dir)->required();
  cmd_warp->add_option("--discontinuity", global.cfg.discontinuity_threshold);

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "masked reconstruction metrics");
  cmd_eval->add_option("--model", eval_args.model_dir)->required();
  cmd_eval->add_option("--pairs", eval_args.pairs_file)->required();
  cmd_eval->add_option("--gen-dir", eval_args.gen_dir)->required();
  cmd_eval->add_option("--target-dir", eval_args.target_dir)->required();
  cmd_eval->add_option("--warp-dir", eval_args.warp_dir)->required();
  cmd_eval->add_option("--out", eval_args.out_file)->required();
  cmd_eval->add_option("--external", eval_args.external_file);

  SplitArgs split_args;
  auto* cmd_split = app.add_subcommand("split", "train/val/test holdout split");
  cmd_split->add_option("--pairs", split_args.pairs_file)->required();
  cmd_split->add_option("--out-prefix", split_args.out_prefix)->required();
  cmd_split->add_option("--holdout-scenes", global.cfg.holdout_scenes);
  cmd_split->add_option("--val-pairs", global.cfg.val_pairs);

  CrawlArgs crawl_args;
  auto* cmd_identify = app.add_subcommand("identify", "identify scene categories");
  cmd_identify->add_option("--classes", crawl_args.classes_csv)->required();
  cmd_identify->add_option("--fixture-dir", crawl_args.fixture_dir);
  cmd_identify->add_flag("--live", crawl_args.live);
  cmd_identify->add_option("--glam-file", crawl_args.glam_file);
  cmd_identify->add_option("--out", crawl_args.out_file);

  auto* cmd_manifest = app.add_subcommand("manifest", "build an image manifest");
  cmd_manifest->add_option("--scene", crawl_args.scene)->required();
  cmd_manifest->add_option("--entity", crawl_args.entity)->required();
  cmd_manifest->add_option("--fixture-dir", crawl_args.fixture_dir);
  cmd_manifest->add_flag("--live", crawl_args.live);
  cmd_manifest->add_option("--keywords-file", crawl_args.keywords_file);
  cmd_manifest->add_option("--max-depth", global.cfg.max_depth);
  cmd_manifest->add_option("--out", crawl_args.out_file);

  auto* cmd_fetch = app.add_subcommand("fetch", "download files from a manifest");
  cmd_fetch->add_option("--manifest", crawl_args.fetch_manifest)->required();
  cmd_fetch->add_option("--out-dir", crawl_args.fetch_dir)->required();

  CLI11_PARSE(app, argc, argv);

  if (const char* env_cache = std::getenv("VIEWPREP_CACHE_DIR")) {
    global.cfg.cache_dir = env_cache;
  }
  if (global.cfg.jobs > 0) omp_set_num_threads(global.cfg.jobs);

  if (global.dry_run) {
    std::cout << "# resolved config\n" << global.cfg.dump();
    for (const auto* cmd :
         {cmd_parse, cmd_mask, cmd_mine, cmd_align, cmd_warp, cmd_eval,
          cmd_split, cmd_identify, cmd_manifest, cmd_fetch}) {
      if (cmd->parsed()) std::cout << "# planned command: " << cmd->get_name() << "\n";
    }
    return kExitOk;
  }

  try {
    KeyValueRecord summary;
    if (cmd_parse->parsed()) summary = run_parse(parse_args);
    else if (cmd_mask->parsed()) summary = run_mask_keypoints(mask_args, global.cfg);
    else if (cmd_mine->parsed()) summary = run_mine(mine_args, global.cfg);
    else if (cmd_align->parsed()) summary = run_align(align_args, global.cfg);
    else if (cmd_warp->parsed()) summary = run_warp(warp_args, global.cfg);
    else if (cmd_eval->parsed()) summary = run_eval(eval_args, global.cfg);
    else if (cmd_split->parsed()) summary = run_split(split_args, global.cfg);
    else if (cmd_identify->parsed()) summary = run_identify(crawl_args, global.cfg);
    else if (cmd_manifest->parsed()) summary = run_manifest(crawl_args, global.cfg);
    else if (cmd_fetch->parsed()) summary = run_fetch(crawl_args, global.cfg);
    for (const auto& [k, v] : summary.items) std::cout << k << '=' << v << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}
