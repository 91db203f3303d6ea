#pragma once

#include <filesystem>
#include <map>

#include "viewprep/crawl/source.hpp"

namespace viewprep::crawl {

// Offline source backed by a directory of JSON records mirroring the live
// responses:
//   entities.json          id -> {label, aliases, instance_of, commons_category}
//   classes.json           id -> {label, subclass_of: [parent ids]}
//   category_links.json    category name -> entity id
//   category_members.json  category name -> {subcats: [...], files: [{title,
//                          url, license, uploaded}]}
// Everything is loaded up front; lookups never touch the filesystem or the
// network afterwards.
class FixtureSource : public SceneSource {
 public:
  explicit FixtureSource(const std::filesystem::path& dir);

  std::vector<std::string> subclasses(const std::string& class_id) override;
  std::vector<std::string> instances(const std::string& class_id) override;
  std::optional<EntityRecord> entity(const std::string& id) override;
  std::optional<std::string> category_entity(const std::string& category) override;
  std::vector<std::string> subcategories(const std::string& category) override;
  std::vector<FileRecord> files(const std::string& category) override;

 private:
  std::map<std::string, EntityRecord> entities_;
  std::map<std::string, std::vector<std::string>> subclass_of_;  // child ids per parent
  std::map<std::string, std::vector<std::string>> instances_;    // entity ids per class
  std::map<std::string, std::string> category_links_;
  std::map<std::string, std::vector<std::string>> subcategories_;
  std::map<std::string, std::vector<FileRecord>> files_;
};

}  // namespace viewprep::crawl
