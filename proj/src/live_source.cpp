#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "viewprep/crawl/live_source.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace viewprep::crawl {

namespace api {

namespace {
using nlohmann::json;

std::string strip_entity_prefix(const std::string& uri) {
  const auto slash = uri.rfind('/');
  return slash == std::string::npos ? uri : uri.substr(slash + 1);
}

std::string strip_category_prefix(const std::string& title) {
  constexpr const char* kPrefix = "Category:";
  return title.rfind(kPrefix, 0) == 0 ? title.substr(9) : title;
}
}  // namespace

std::optional<EntityRecord> parse_entity_response(const std::string& body,
                                                  const std::string& id) {
  const json doc = json::parse(body);
  if (!doc.contains("entities") || !doc["entities"].contains(id)) {
    return std::nullopt;
  }
  const json& ent = doc["entities"][id];
  if (ent.contains("missing")) return std::nullopt;

  EntityRecord record;
  record.id = id;
  if (ent.contains("labels") && ent["labels"].contains("en")) {
    record.label = ent["labels"]["en"].value("value", "");
  }
  if (ent.contains("aliases") && ent["aliases"].contains("en")) {
    for (const auto& alias : ent["aliases"]["en"]) {
      record.aliases.push_back(alias.value("value", ""));
    }
  }
  if (ent.contains("claims")) {
    const json& claims = ent["claims"];
    if (claims.contains("P31")) {
      for (const auto& claim : claims["P31"]) {
        const auto& snak = claim["mainsnak"];
        if (snak.contains("datavalue")) {
          record.instance_of.push_back(snak["datavalue"]["value"].value("id", ""));
        }
      }
    }
    if (claims.contains("P373") && !claims["P373"].empty()) {
      const auto& snak = claims["P373"][0]["mainsnak"];
      if (snak.contains("datavalue")) {
        record.commons_category = snak["datavalue"]["value"].get<std::string>();
      }
    }
  }
  return record;
}

CategoryMembers parse_category_members(const std::string& body) {
  const json doc = json::parse(body);
  CategoryMembers members;
  if (doc.contains("query") && doc["query"].contains("categorymembers")) {
    for (const auto& member : doc["query"]["categorymembers"]) {
      members.titles.push_back(strip_category_prefix(member.value("title", "")));
    }
  }
  if (doc.contains("continue")) {
    members.continue_token = doc["continue"].value("cmcontinue", "");
  }
  return members;
}

std::optional<std::string> parse_pageprops_entity(const std::string& body) {
  const json doc = json::parse(body);
  if (!doc.contains("query") || !doc["query"].contains("pages")) {
    return std::nullopt;
  }
  for (const auto& [key, page] : doc["query"]["pages"].items()) {
    (void)key;
    if (page.contains("pageprops") &&
        page["pageprops"].contains("wikibase_item")) {
      return page["pageprops"]["wikibase_item"].get<std::string>();
    }
  }
  return std::nullopt;
}

std::vector<FileRecord> parse_imageinfo(const std::string& body) {
  const json doc = json::parse(body);
  std::vector<FileRecord> files;
  if (!doc.contains("query") || !doc["query"].contains("pages")) return files;
  for (const auto& [key, page] : doc["query"]["pages"].items()) {
    (void)key;
    FileRecord record;
    record.title = page.value("title", "");
    if (page.contains("imageinfo") && !page["imageinfo"].empty()) {
      const json& info = page["imageinfo"][0];
      record.url = info.value("url", "");
      record.uploaded = info.value("timestamp", "");
      if (info.contains("extmetadata") &&
          info["extmetadata"].contains("LicenseShortName")) {
        record.license = info["extmetadata"]["LicenseShortName"].value("value", "");
      }
    }
    files.push_back(std::move(record));
  }
  return files;
}

std::vector<std::string> parse_sparql_ids(const std::string& body) {
  const json doc = json::parse(body);
  std::vector<std::string> ids;
  if (!doc.contains("results") || !doc["results"].contains("bindings")) {
    return ids;
  }
  for (const auto& binding : doc["results"]["bindings"]) {
    if (binding.contains("x")) {
      ids.push_back(strip_entity_prefix(binding["x"].value("value", "")));
    }
  }
  return ids;
}

std::string url_encode(const std::string& value) {
  std::ostringstream out;
  out << std::hex << std::uppercase;
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out << c;
    } else {
      out << '%' << int(c >> 4) << int(c & 0xF);
    }
  }
  return out.str();
}

}  // namespace api

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

struct LiveSource::Impl {
  LiveConfig config;
  httplib::Client catalog;
  httplib::Client graph;
  httplib::Client sparql;
  std::mutex slots_mutex;
  std::condition_variable slot_free;
  int in_flight = 0;
  std::mt19937_64 jitter_rng{std::random_device{}()};
  std::mutex jitter_mutex;

  explicit Impl(const LiveConfig& cfg)
      : config(cfg),
        catalog(cfg.catalog_base),
        graph(cfg.graph_base),
        sparql(cfg.sparql_base) {
    if (config.user_agent.empty()) {
      throw std::invalid_argument(
          "LiveSource requires a descriptive user agent");
    }
    for (httplib::Client* client : {&catalog, &graph, &sparql}) {
      client->set_default_headers({{"User-Agent", config.user_agent}});
      client->set_follow_location(true);
      client->set_connection_timeout(20);
      client->set_read_timeout(60);
    }
  }

  std::optional<std::string> cache_lookup(const std::string& url) {
    if (config.cache_dir.empty()) return std::nullopt;
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.json",
                  static_cast<unsigned long long>(fnv1a64(url)));
    std::ifstream in(config.cache_dir / name, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
  }

  void cache_store(const std::string& url, const std::string& body) {
    if (config.cache_dir.empty()) return;
    std::filesystem::create_directories(config.cache_dir);
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.json",
                  static_cast<unsigned long long>(fnv1a64(url)));
    std::ofstream out(config.cache_dir / name, std::ios::binary);
    out << body;
  }

  // GET with the concurrency bound, retry/backoff policy, and cache.
  std::string fetch(httplib::Client& client, const std::string& base,
                    const std::string& path_and_query) {
    const std::string url = base + path_and_query;
    if (auto cached = cache_lookup(url)) return *cached;

    {
      std::unique_lock lock(slots_mutex);
      slot_free.wait(lock,
                     [&] { return in_flight < config.max_concurrent_requests; });
      ++in_flight;
    }
    std::string body;
    std::string error;
    bool ok = false;
    for (int attempt = 0; attempt <= config.max_retries && !ok; ++attempt) {
      if (attempt > 0) {
        double jitter;
        {
          std::lock_guard guard(jitter_mutex);
          jitter = std::uniform_real_distribution<double>(0, 1)(jitter_rng);
        }
        const double seconds = std::min(30.0, (1 << (attempt - 1)) * (1.0 + jitter));
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
      }
      auto res = client.Get(path_and_query);
      if (!res) {
        error = "transport error " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        error = "status " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        {
          std::lock_guard lock(slots_mutex);
          --in_flight;
        }
        slot_free.notify_one();
        throw std::runtime_error("request failed (" +
                                 std::to_string(res->status) + "): " + url);
      }
      body = res->body;
      ok = true;
    }
    {
      std::lock_guard lock(slots_mutex);
      --in_flight;
    }
    slot_free.notify_one();
    if (!ok) {
      throw std::runtime_error("request failed after retries (" + error +
                               "): " + url);
    }
    cache_store(url, body);
    return body;
  }

  std::vector<std::string> category_members(const std::string& category,
                                            const std::string& type) {
    std::vector<std::string> titles;
    std::string cont;
    do {
      std::string query =
          "/w/api.php?action=query&list=categorymembers&cmtitle=Category:" +
          api::url_encode(category) + "&cmtype=" + type +
          "&cmlimit=500&format=json";
      if (!cont.empty()) query += "&cmcontinue=" + api::url_encode(cont);
      const auto members =
          api::parse_category_members(fetch(catalog, config.catalog_base, query));
      titles.insert(titles.end(), members.titles.begin(), members.titles.end());
      cont = members.continue_token;
    } while (!cont.empty());
    return titles;
  }

  std::vector<std::string> sparql_query(const std::string& predicate,
                                        const std::string& class_id) {
    const std::string query = "SELECT ?x WHERE { ?x wdt:" + predicate +
                              " wd:" + class_id + " }";
    const std::string path =
        "/sparql?query=" + api::url_encode(query) + "&format=json";
    return api::parse_sparql_ids(fetch(sparql, config.sparql_base, path));
  }
};

LiveSource::LiveSource(const LiveConfig& config)
    : impl_(std::make_unique<Impl>(config)) {}

LiveSource::~LiveSource() = default;

std::vector<std::string> LiveSource::subclasses(const std::string& class_id) {
  return impl_->sparql_query("P279", class_id);
}

std::vector<std::string> LiveSource::instances(const std::string& class_id) {
  return impl_->sparql_query("P31", class_id);
}

std::optional<EntityRecord> LiveSource::entity(const std::string& id) {
  const std::string path =
      "/w/api.php?action=wbgetentities&ids=" + api::url_encode(id) +
      "&props=labels%7Caliases%7Cclaims&languages=en&format=json";
  return api::parse_entity_response(
      impl_->fetch(impl_->graph, impl_->config.graph_base, path), id);
}

std::optional<std::string> LiveSource::category_entity(
    const std::string& category) {
  const std::string path =
      "/w/api.php?action=query&prop=pageprops&ppprop=wikibase_item&titles="
      "Category:" +
      api::url_encode(category) + "&format=json";
  return api::parse_pageprops_entity(
      impl_->fetch(impl_->catalog, impl_->config.catalog_base, path));
}

std::vector<std::string> LiveSource::subcategories(const std::string& category) {
  return impl_->category_members(category, "subcat");
}

std::optional<std::string> fetch_url(const std::string& url,
                                     const std::string& user_agent) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string base =
      path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_default_headers({{"User-Agent", user_agent}});
  client.set_follow_location(true);
  client.set_connection_timeout(20);
  client.set_read_timeout(120);
  auto res = client.Get(path);
  if (!res || res->status != 200) return std::nullopt;
  return res->body;
}

std::vector<FileRecord> LiveSource::files(const std::string& category) {
  const auto titles = impl_->category_members(category, "file");
  std::vector<FileRecord> records;
  for (size_t start = 0; start < titles.size(); start += 50) {
    std::string joined;
    for (size_t i = start; i < std::min(titles.size(), start + 50); ++i) {
      if (!joined.empty()) joined += "|";
      joined += titles[i];
    }
    const std::string path =
        "/w/api.php?action=query&prop=imageinfo&iiprop=url%7Ctimestamp%7C"
        "extmetadata&titles=" +
        api::url_encode(joined) + "&format=json";
    const auto batch = api::parse_imageinfo(
        impl_->fetch(impl_->catalog, impl_->config.catalog_base, path));
    records.insert(records.end(), batch.begin(), batch.end());
  }
  return records;
}

}  // namespace viewprep::crawl
