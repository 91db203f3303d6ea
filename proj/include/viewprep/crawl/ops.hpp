#pragma once

#include <set>
#include <string>
#include <vector>

#include "viewprep/crawl/source.hpp"

namespace viewprep::crawl {

// Categories that are instances (via the transitive subclass closure) of any
// listed class and that link to a media-catalog category. Output is sorted
// by category name for stable serialization.
std::vector<SceneCategory> identify_scenes(
    const std::vector<std::string>& class_ids, SceneSource& graph);

// Keeps a candidate iff following catalog-category -> entity returns the
// entity that produced the candidate in the first place.
std::vector<SceneCategory> cyclic_link_filter(
    const std::vector<SceneCategory>& candidates, SceneSource& graph);

// Drops candidates whose instance-of classes are all in the GLAM set;
// candidates without any resolved class are kept but flagged. Entries in
// glam_classes match class entity ids exactly or labels case-insensitively.
std::vector<SceneCategory> glam_filter(
    const std::vector<SceneCategory>& candidates, SceneSource& graph,
    const std::set<std::string>& glam_classes);

struct RecursionRules {
  int max_depth = 4;
  std::vector<std::string> excluded_keywords;
  std::vector<std::string> name_substrings;  // category name, entity label, aliases
};

// Depth-limited traversal of the subcategory tree. A subcategory is entered
// iff no excluded keyword occurs in its title and at least one name
// substring does (both case-insensitive); a visited set breaks cycles.
CategoryNode recurse_subcategories(const SceneCategory& root,
                                   SceneSource& catalog,
                                   const RecursionRules& rules);

// One entry per file page in the tree, deduplicated by title in traversal
// order. Files without a license are flagged and excluded from the default
// manifest. No image bytes are fetched.
ManifestResult build_manifest(const CategoryNode& tree, SceneSource& catalog);

// Rules derived from a scene per the recursion contract: the category name,
// the entity label, and every alias.
RecursionRules default_rules_for(const SceneCategory& scene,
                                 SceneSource& graph,
                                 const std::vector<std::string>& excluded_keywords,
                                 int max_depth = 4);

// Line-delimited serializations used by the CLI and the byte-stability
// checks.
std::string serialize_scenes(const std::vector<SceneCategory>& scenes);
std::string serialize_manifest(const ManifestResult& manifest);

}  // namespace viewprep::crawl
