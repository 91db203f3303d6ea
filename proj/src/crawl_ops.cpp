#include "viewprep/crawl/ops.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace viewprep::crawl {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

std::vector<std::string> resolve_class_labels(const EntityRecord& entity,
                                              SceneSource& graph) {
  std::vector<std::string> labels;
  for (const std::string& class_id : entity.instance_of) {
    const auto cls = graph.entity(class_id);
    labels.push_back(cls && !cls->label.empty() ? cls->label : class_id);
  }
  return labels;
}

void walk_tree(const CategoryNode& node, const std::string& parent_path,
               ManifestResult& manifest, std::set<std::string>& seen,
               SceneSource& catalog) {
  const std::string path =
      parent_path.empty() ? node.name : parent_path + "/" + node.name;
  for (const FileRecord& file : catalog.files(node.name)) {
    if (!seen.insert(file.title).second) continue;
    ManifestEntry entry{file.title, file.url, file.license, file.uploaded, path};
    if (file.license.empty()) {
      manifest.excluded_unlicensed.push_back(std::move(entry));
    } else {
      manifest.entries.push_back(std::move(entry));
    }
  }
  for (const CategoryNode& child : node.children) {
    walk_tree(child, path, manifest, seen, catalog);
  }
}

void serialize_node(const CategoryNode& node, std::ostringstream& out) {
  out << std::string(size_t(node.depth) * 2, ' ') << node.name << " [depth "
      << node.depth << "]\n";
  for (const CategoryNode& child : node.children) serialize_node(child, out);
}

}  // namespace

std::vector<SceneCategory> identify_scenes(
    const std::vector<std::string>& class_ids, SceneSource& graph) {
  // Transitive subclass closure, breadth-first.
  std::set<std::string> closure;
  std::deque<std::string> queue(class_ids.begin(), class_ids.end());
  while (!queue.empty()) {
    const std::string cls = queue.front();
    queue.pop_front();
    if (!closure.insert(cls).second) continue;
    for (const std::string& sub : graph.subclasses(cls)) queue.push_back(sub);
  }

  std::set<std::string> entity_ids;
  for (const std::string& cls : closure) {
    for (const std::string& id : graph.instances(cls)) entity_ids.insert(id);
  }

  std::vector<SceneCategory> scenes;
  for (const std::string& id : entity_ids) {
    const auto entity = graph.entity(id);
    if (!entity || !entity->commons_category) continue;
    SceneCategory scene;
    scene.commons_category = *entity->commons_category;
    scene.entity_id = id;
    scene.class_labels = resolve_class_labels(*entity, graph);
    scene.subcategories = {scene.commons_category, 0, {}};
    scenes.push_back(std::move(scene));
  }
  std::sort(scenes.begin(), scenes.end(),
            [](const SceneCategory& a, const SceneCategory& b) {
              return std::tie(a.commons_category, a.entity_id) <
                     std::tie(b.commons_category, b.entity_id);
            });
  return scenes;
}

std::vector<SceneCategory> cyclic_link_filter(
    const std::vector<SceneCategory>& candidates, SceneSource& graph) {
  std::vector<SceneCategory> kept;
  for (const SceneCategory& candidate : candidates) {
    const auto back = graph.category_entity(candidate.commons_category);
    if (back && *back == candidate.entity_id) kept.push_back(candidate);
  }
  return kept;
}

std::vector<SceneCategory> glam_filter(
    const std::vector<SceneCategory>& candidates, SceneSource& graph,
    const std::set<std::string>& glam_classes) {
  std::set<std::string> glam_lower;
  for (const std::string& g : glam_classes) glam_lower.insert(lower(g));

  std::vector<SceneCategory> kept;
  for (const SceneCategory& candidate : candidates) {
    const auto entity = graph.entity(candidate.entity_id);
    if (!entity) {
      throw std::runtime_error("glam_filter: unresolved entity " +
                               candidate.entity_id);
    }
    const std::vector<std::string>& class_ids = entity->instance_of;

    if (class_ids.empty()) {
      SceneCategory flagged = candidate;
      flagged.flags.push_back("empty-class-list");
      kept.push_back(std::move(flagged));
      continue;
    }

    bool has_non_glam = false;
    for (const std::string& class_id : class_ids) {
      const auto cls = graph.entity(class_id);
      const std::string label = cls ? cls->label : "";
      const bool is_glam =
          glam_classes.count(class_id) || glam_lower.count(lower(label));
      if (!is_glam) {
        has_non_glam = true;
        break;
      }
    }
    if (has_non_glam) kept.push_back(candidate);
  }
  return kept;
}

CategoryNode recurse_subcategories(const SceneCategory& root,
                                   SceneSource& catalog,
                                   const RecursionRules& rules) {
  if (rules.name_substrings.empty()) {
    throw std::invalid_argument(
        "recurse_subcategories: name_substrings must not be empty");
  }

  CategoryNode tree{root.commons_category, 0, {}};
  std::set<std::string> visited{lower(root.commons_category)};

  const auto enter = [&](const std::string& title) {
    for (const std::string& kw : rules.excluded_keywords) {
      if (contains_ci(title, kw)) return false;
    }
    for (const std::string& name : rules.name_substrings) {
      if (contains_ci(title, name)) return true;
    }
    return false;
  };

  // Children are sorted so the tree (and everything serialized from it) is
  // independent of catalog listing order.
  const std::function<void(CategoryNode&)> descend = [&](CategoryNode& node) {
    if (node.depth >= rules.max_depth) return;
    std::vector<std::string> subs = catalog.subcategories(node.name);
    std::sort(subs.begin(), subs.end());
    for (const std::string& sub : subs) {
      if (visited.count(lower(sub))) continue;
      if (!enter(sub)) continue;
      visited.insert(lower(sub));
      node.children.push_back({sub, node.depth + 1, {}});
      descend(node.children.back());
    }
  };
  descend(tree);
  return tree;
}

ManifestResult build_manifest(const CategoryNode& tree, SceneSource& catalog) {
  ManifestResult manifest;
  std::set<std::string> seen;
  walk_tree(tree, "", manifest, seen, catalog);
  return manifest;
}

RecursionRules default_rules_for(const SceneCategory& scene, SceneSource& graph,
                                 const std::vector<std::string>& excluded_keywords,
                                 int max_depth) {
  RecursionRules rules;
  rules.max_depth = max_depth;
  rules.excluded_keywords = excluded_keywords;
  rules.name_substrings.push_back(scene.commons_category);
  if (const auto entity = graph.entity(scene.entity_id)) {
    if (!entity->label.empty()) rules.name_substrings.push_back(entity->label);
    for (const std::string& alias : entity->aliases) {
      rules.name_substrings.push_back(alias);
    }
  }
  return rules;
}

std::string serialize_scenes(const std::vector<SceneCategory>& scenes) {
  std::ostringstream out;
  for (const SceneCategory& scene : scenes) {
    out << scene.commons_category << '\t' << scene.entity_id << '\t';
    for (size_t i = 0; i < scene.class_labels.size(); ++i) {
      if (i) out << ',';
      out << scene.class_labels[i];
    }
    out << '\t';
    for (size_t i = 0; i < scene.flags.size(); ++i) {
      if (i) out << ',';
      out << scene.flags[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string serialize_manifest(const ManifestResult& manifest) {
  std::ostringstream out;
  out << "# title\turl\tlicense\tuploaded\tcategory_path\n";
  for (const ManifestEntry& e : manifest.entries) {
    out << e.title << '\t' << e.url << '\t' << e.license << '\t' << e.uploaded
        << '\t' << e.category_path << '\n';
  }
  for (const ManifestEntry& e : manifest.excluded_unlicensed) {
    out << "# excluded-unlicensed: " << e.title << '\t' << e.category_path
        << '\n';
  }
  return out.str();
}

}  // namespace viewprep::crawl
