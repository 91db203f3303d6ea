#include "viewprep/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace viewprep {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

struct Field {
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"min_shared",
       {[](PipelineConfig& c, const std::string& v) { c.min_shared = std::stoll(v); },
        [](const PipelineConfig& c) { return std::to_string(c.min_shared); }}},
      {"max_dt",
       {[](PipelineConfig& c, const std::string& v) { c.max_dt = std::stoll(v); },
        [](const PipelineConfig& c) { return std::to_string(c.max_dt); }}},
      {"aspect_tol",
       {[](PipelineConfig& c, const std::string& v) { c.aspect_tol = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.aspect_tol); }}},
      {"quantile",
       {[](PipelineConfig& c, const std::string& v) { c.quantile = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.quantile); }}},
      {"target_size",
       {[](PipelineConfig& c, const std::string& v) { c.target_size = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.target_size); }}},
      {"score_threshold",
       {[](PipelineConfig& c, const std::string& v) { c.score_threshold = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.score_threshold); }}},
      {"holdout_scenes",
       {[](PipelineConfig& c, const std::string& v) { c.holdout_scenes = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.holdout_scenes); }}},
      {"val_pairs",
       {[](PipelineConfig& c, const std::string& v) { c.val_pairs = std::stoll(v); },
        [](const PipelineConfig& c) { return std::to_string(c.val_pairs); }}},
      {"ransac_iterations",
       {[](PipelineConfig& c, const std::string& v) { c.ransac_iterations = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.ransac_iterations); }}},
      {"inlier_threshold",
       {[](PipelineConfig& c, const std::string& v) { c.inlier_threshold = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.inlier_threshold); }}},
      {"min_inliers",
       {[](PipelineConfig& c, const std::string& v) { c.min_inliers = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.min_inliers); }}},
      {"scale_only",
       {[](PipelineConfig& c, const std::string& v) { c.scale_only = parse_bool(v); },
        [](const PipelineConfig& c) { return c.scale_only ? "true" : "false"; }}},
      {"invert_input",
       {[](PipelineConfig& c, const std::string& v) { c.invert_input = parse_bool(v); },
        [](const PipelineConfig& c) { return c.invert_input ? "true" : "false"; }}},
      {"discontinuity_threshold",
       {[](PipelineConfig& c, const std::string& v) { c.discontinuity_threshold = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.discontinuity_threshold); }}},
      {"sentinel_rgb",
       {[](PipelineConfig& c, const std::string& v) {
          std::istringstream in(v);
          int r, g, b;
          char comma1, comma2;
          if (!(in >> r >> comma1 >> g >> comma2 >> b) || comma1 != ',' ||
              comma2 != ',' || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 ||
              b > 255) {
            throw std::invalid_argument("sentinel_rgb expects r,g,b in 0..255");
          }
          c.sentinel_rgb = {uint8_t(r), uint8_t(g), uint8_t(b)};
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.sentinel_rgb[0]) + "," +
                 std::to_string(c.sentinel_rgb[1]) + "," +
                 std::to_string(c.sentinel_rgb[2]);
        }}},
      {"psnr_cap",
       {[](PipelineConfig& c, const std::string& v) { c.psnr_cap = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.psnr_cap); }}},
      {"border_fraction",
       {[](PipelineConfig& c, const std::string& v) { c.border_fraction = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.border_fraction); }}},
      {"watermark_threshold",
       {[](PipelineConfig& c, const std::string& v) { c.watermark_threshold = std::stod(v); },
        [](const PipelineConfig& c) { return format_double(c.watermark_threshold); }}},
      {"max_depth",
       {[](PipelineConfig& c, const std::string& v) { c.max_depth = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.max_depth); }}},
      {"user_agent",
       {[](PipelineConfig& c, const std::string& v) { c.user_agent = v; },
        [](const PipelineConfig& c) { return c.user_agent; }}},
      {"max_retries",
       {[](PipelineConfig& c, const std::string& v) { c.max_retries = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.max_retries); }}},
      {"max_concurrent_requests",
       {[](PipelineConfig& c, const std::string& v) { c.max_concurrent_requests = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.max_concurrent_requests); }}},
      {"seed",
       {[](PipelineConfig& c, const std::string& v) { c.seed = std::stoull(v); },
        [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
      {"jobs",
       {[](PipelineConfig& c, const std::string& v) { c.jobs = std::stoi(v); },
        [](const PipelineConfig& c) { return std::to_string(c.jobs); }}},
      {"cache_dir",
       {[](PipelineConfig& c, const std::string& v) { c.cache_dir = v; },
        [](const PipelineConfig& c) { return c.cache_dir; }}},
  };
  return table;
}

}  // namespace

void PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("missing config file: " + path.string());

  std::map<std::string, const Field*> lookup;
  for (const auto& [name, field] : fields()) lookup[name] = &field;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  " is not key=value: " + line);
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw std::invalid_argument("unknown config key '" + key + "' (line " +
                                  std::to_string(line_no) + ")");
    }
    try {
      it->second->set(*this, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("bad value for '" + key + "': " + e.what());
    }
  }
}

std::string PipelineConfig::dump() const {
  std::ostringstream out;
  for (const auto& [name, field] : fields()) {
    out << name << '=' << field.get(*this) << '\n';
  }
  return out.str();
}

void KeyValueRecord::set(const std::string& key, const std::string& value) {
  items.emplace_back(key, value);
}

void KeyValueRecord::set(const std::string& key, double value) {
  items.emplace_back(key, format_double(value));
}

std::string KeyValueRecord::get(const std::string& key) const {
  for (const auto& [k, v] : items) {
    if (k == key) return v;
  }
  throw std::out_of_range("no such key: " + key);
}

double KeyValueRecord::get_double(const std::string& key) const {
  return std::stod(get(key));
}

void KeyValueRecord::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("unwritable path: " + path.string());
  for (const auto& [k, v] : items) out << k << '=' << v << '\n';
}

KeyValueRecord KeyValueRecord::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing record file: " + path.string());
  KeyValueRecord record;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    record.items.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return record;
}

}  // namespace viewprep
