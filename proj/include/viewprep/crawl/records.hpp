#pragma once

#include <optional>
#include <string>
#include <vector>

namespace viewprep::crawl {

// Knowledge-graph entity, reduced to the fields the curation rules read.
struct EntityRecord {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;
  std::vector<std::string> instance_of;  // class entity ids
  std::optional<std::string> commons_category;
};

// One file page in the media catalog.
struct FileRecord {
  std::string title;
  std::string url;
  std::string license;  // empty when the page declares none
  std::string uploaded;
};

struct CategoryNode {
  std::string name;
  int depth = 0;
  std::vector<CategoryNode> children;
};

struct SceneCategory {
  std::string commons_category;
  std::string entity_id;
  std::vector<std::string> class_labels;
  CategoryNode subcategories;
  std::vector<std::string> flags;
};

struct ManifestEntry {
  std::string title;
  std::string url;
  std::string license;
  std::string uploaded;
  std::string category_path;
};

struct ManifestResult {
  std::vector<ManifestEntry> entries;            // licensed, deduplicated
  std::vector<ManifestEntry> excluded_unlicensed;  // flagged, kept out of the default manifest
};

}  // namespace viewprep::crawl
