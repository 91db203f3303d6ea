#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "viewprep/crawl/source.hpp"

namespace viewprep::crawl {

struct LiveConfig {
  std::string catalog_base = "https://commons.wikimedia.org";
  std::string graph_base = "https://www.wikidata.org";
  std::string sparql_base = "https://query.wikidata.org";
  std::string user_agent;  // mandatory, descriptive
  int max_retries = 5;
  int max_concurrent_requests = 2;
  std::filesystem::path cache_dir;  // empty disables the response cache
};

// Live client for the public catalog/graph endpoints: bounded request
// concurrency, exponential backoff with jitter on 429/5xx, and an on-disk
// response cache keyed by request URL.
class LiveSource : public SceneSource {
 public:
  explicit LiveSource(const LiveConfig& config);
  ~LiveSource() override;

  std::vector<std::string> subclasses(const std::string& class_id) override;
  std::vector<std::string> instances(const std::string& class_id) override;
  std::optional<EntityRecord> entity(const std::string& id) override;
  std::optional<std::string> category_entity(const std::string& category) override;
  std::vector<std::string> subcategories(const std::string& category) override;
  std::vector<FileRecord> files(const std::string& category) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Single-shot download used by the manifest fetch command. Returns the
// response body, or nullopt on any failure.
std::optional<std::string> fetch_url(const std::string& url,
                                     const std::string& user_agent);

// Response decoding, shared with the offline tests.
namespace api {

std::optional<EntityRecord> parse_entity_response(const std::string& body,
                                                  const std::string& id);

struct CategoryMembers {
  std::vector<std::string> titles;
  std::string continue_token;
};
CategoryMembers parse_category_members(const std::string& body);

std::optional<std::string> parse_pageprops_entity(const std::string& body);

std::vector<FileRecord> parse_imageinfo(const std::string& body);

std::vector<std::string> parse_sparql_ids(const std::string& body);

std::string url_encode(const std::string& value);

}  // namespace api

}  // namespace viewprep::crawl
