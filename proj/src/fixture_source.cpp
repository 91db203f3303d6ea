#include "viewprep/crawl/fixture_source.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace viewprep::crawl {

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("missing fixture file: " + path.string());
  }
  return nlohmann::json::parse(in);
}

}  // namespace

FixtureSource::FixtureSource(const std::filesystem::path& dir) {
  const auto entities = load_json(dir / "entities.json");
  for (const auto& [id, body] : entities.items()) {
    EntityRecord record;
    record.id = id;
    record.label = body.value("label", "");
    for (const auto& alias : body.value("aliases", nlohmann::json::array())) {
      record.aliases.push_back(alias.get<std::string>());
    }
    for (const auto& cls : body.value("instance_of", nlohmann::json::array())) {
      record.instance_of.push_back(cls.get<std::string>());
    }
    if (body.contains("commons_category")) {
      record.commons_category = body["commons_category"].get<std::string>();
    }
    for (const std::string& cls : record.instance_of) {
      instances_[cls].push_back(id);
    }
    entities_.emplace(id, std::move(record));
  }

  const auto classes = load_json(dir / "classes.json");
  for (const auto& [id, body] : classes.items()) {
    if (!entities_.count(id)) {
      EntityRecord record;
      record.id = id;
      record.label = body.value("label", "");
      entities_.emplace(id, std::move(record));
    } else if (entities_.at(id).label.empty()) {
      entities_.at(id).label = body.value("label", "");
    }
    for (const auto& parent : body.value("subclass_of", nlohmann::json::array())) {
      subclass_of_[parent.get<std::string>()].push_back(id);
    }
  }

  const auto links = load_json(dir / "category_links.json");
  for (const auto& [category, entity_id] : links.items()) {
    category_links_[category] = entity_id.get<std::string>();
  }

  const auto members = load_json(dir / "category_members.json");
  for (const auto& [category, body] : members.items()) {
    for (const auto& sub : body.value("subcats", nlohmann::json::array())) {
      subcategories_[category].push_back(sub.get<std::string>());
    }
    for (const auto& file : body.value("files", nlohmann::json::array())) {
      FileRecord record;
      record.title = file.value("title", "");
      record.url = file.value("url", "");
      record.license = file.value("license", "");
      record.uploaded = file.value("uploaded", "");
      files_[category].push_back(std::move(record));
    }
  }
}

std::vector<std::string> FixtureSource::subclasses(const std::string& class_id) {
  const auto it = subclass_of_.find(class_id);
  return it == subclass_of_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> FixtureSource::instances(const std::string& class_id) {
  const auto it = instances_.find(class_id);
  return it == instances_.end() ? std::vector<std::string>{} : it->second;
}

std::optional<EntityRecord> FixtureSource::entity(const std::string& id) {
  const auto it = entities_.find(id);
  if (it == entities_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> FixtureSource::category_entity(
    const std::string& category) {
  const auto it = category_links_.find(category);
  if (it == category_links_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> FixtureSource::subcategories(const std::string& category) {
  const auto it = subcategories_.find(category);
  return it == subcategories_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<FileRecord> FixtureSource::files(const std::string& category) {
  const auto it = files_.find(category);
  return it == files_.end() ? std::vector<FileRecord>{} : it->second;
}

}  // namespace viewprep::crawl
