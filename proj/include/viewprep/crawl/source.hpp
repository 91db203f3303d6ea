#pragma once

#include <optional>
#include <string>
#include <vector>

#include "viewprep/crawl/records.hpp"

namespace viewprep::crawl {

// Transport abstraction over the knowledge graph and the media catalog. The
// fixture and live implementations answer the same primitive queries, so
// every curation rule above this interface is an offline-testable pure
// function of a source snapshot.
class SceneSource {
 public:
  virtual ~SceneSource() = default;

  // Knowledge graph.
  virtual std::vector<std::string> subclasses(const std::string& class_id) = 0;
  virtual std::vector<std::string> instances(const std::string& class_id) = 0;
  virtual std::optional<EntityRecord> entity(const std::string& id) = 0;

  // Media catalog.
  virtual std::optional<std::string> category_entity(
      const std::string& category) = 0;
  virtual std::vector<std::string> subcategories(const std::string& category) = 0;
  virtual std::vector<FileRecord> files(const std::string& category) = 0;
};

}  // namespace viewprep::crawl
