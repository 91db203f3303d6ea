#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "viewprep/crawl/fixture_source.hpp"
#include "viewprep/crawl/live_source.hpp"
#include "viewprep/crawl/ops.hpp"

using namespace viewprep::crawl;

namespace {

std::string fixture_dir() {
  return std::string(VIEWPREP_SOURCE_DIR) + "/tests/fixtures/crawler";
}

const std::set<std::string> kGlam = {"museum", "library", "archive", "gallery"};

SceneCategory scene_for(const std::string& category, const std::string& entity) {
  SceneCategory scene;
  scene.commons_category = category;
  scene.entity_id = entity;
  return scene;
}

}  // namespace

TEST_CASE("identify_scenes walks the subclass closure (hand-walked oracle)") {
  FixtureSource source(fixture_dir());
  const auto scenes = identify_scenes({"Q12280"}, source);

  // Closure {bridge, road bridge}; instances with a commons link:
  // Q100, Q101 (direct) and Q106 (via road bridge). Q107 has no category.
  REQUIRE(scenes.size() == 3);
  CHECK(scenes[0].commons_category == "Harbor Bridge");
  CHECK(scenes[1].commons_category == "Old Road Bridge");
  CHECK(scenes[2].commons_category == "Stone Arch Bridge");
  CHECK(scenes[1].class_labels == std::vector<std::string>{"road bridge"});
  CHECK(scenes[2].class_labels == std::vector<std::string>{"bridge"});
}

TEST_CASE("identify_scenes with an empty class list is empty") {
  FixtureSource source(fixture_dir());
  CHECK(identify_scenes({}, source).empty());
}

TEST_CASE("cyclic link filter keeps true cycles and drops the Windmills case") {
  FixtureSource source(fixture_dir());
  const auto scenes = identify_scenes({"Q12280", "Q483453"}, source);
  // Q102 ("Windmills") is identified via the windmill class...
  REQUIRE(scenes.size() == 4);

  const auto kept = cyclic_link_filter(scenes, source);
  // ...but the Windmills category points back to Q999, not Q102.
  REQUIRE(kept.size() == 3);
  for (const auto& scene : kept) {
    CHECK(scene.commons_category != "Windmills");
  }
}

TEST_CASE("cyclic link filter drops candidates without a category link") {
  FixtureSource source(fixture_dir());
  const auto kept =
      cyclic_link_filter({scene_for("No Such Category", "Q100")}, source);
  CHECK(kept.empty());
}

TEST_CASE("glam filter drops museum-only, keeps museum+castle, flags empty") {
  FixtureSource source(fixture_dir());

  const auto museum_only = glam_filter({scene_for("City Museum", "Q103")},
                                       source, kGlam);
  CHECK(museum_only.empty());

  const auto mixed = glam_filter({scene_for("Castle Museum", "Q104")},
                                 source, kGlam);
  REQUIRE(mixed.size() == 1);

  const auto empty_classes = glam_filter({scene_for("Mystery Place", "Q105")},
                                         source, kGlam);
  REQUIRE(empty_classes.size() == 1);
  REQUIRE(empty_classes[0].flags.size() == 1);
  CHECK(empty_classes[0].flags[0] == "empty-class-list");

  CHECK_THROWS_AS(glam_filter({scene_for("Ghost", "Q404")}, source, kGlam),
                  std::runtime_error);
}

TEST_CASE("glam and cyclic filters commute") {
  FixtureSource source(fixture_dir());
  const auto scenes =
      identify_scenes({"Q12280", "Q483453", "Q33506", "Q23413"}, source);

  const auto ab = glam_filter(cyclic_link_filter(scenes, source), source, kGlam);
  const auto ba = cyclic_link_filter(glam_filter(scenes, source, kGlam), source);
  REQUIRE(ab.size() == ba.size());
  for (size_t i = 0; i < ab.size(); ++i) {
    CHECK(ab[i].commons_category == ba[i].commons_category);
  }
}

TEST_CASE("subcategory recursion applies keyword and substring rules") {
  FixtureSource source(fixture_dir());
  SceneCategory scene = scene_for("Old Town Cathedral", "Q110");
  const auto rules = default_rules_for(scene, source,
                                       {"People associated with", "postcards"});
  REQUIRE(rules.name_substrings.size() == 3);  // category, label, alias

  const CategoryNode tree = recurse_subcategories(scene, source, rules);
  REQUIRE(tree.children.size() == 2);
  // Sorted children: the alias-matched organ category, then the interior.
  CHECK(tree.children[0].name == "Altstadt Cathedral organ recordings");
  CHECK(tree.children[1].name == "Old Town Cathedral interior");
  // "People associated with Old Town Cathedral" and the postcards category
  // are excluded.
}

TEST_CASE("recursion halts at depth 4 on a deeper matching chain") {
  FixtureSource source(fixture_dir());
  SceneCategory scene = scene_for("Old Town Cathedral", "Q110");
  const auto rules = default_rules_for(scene, source, {"People associated with"});
  const CategoryNode tree = recurse_subcategories(scene, source, rules);

  // Follow the interior chain.
  const CategoryNode* node = &tree;
  int depth = 0;
  while (!node->children.empty()) {
    const CategoryNode* next = nullptr;
    for (const CategoryNode& child : node->children) {
      if (child.name.find("interior") != std::string::npos) next = &child;
    }
    if (!next) break;
    node = next;
    depth = node->depth;
  }
  CHECK(depth == 4);
  CHECK(node->name == "Old Town Cathedral interior details closeups 2020");
}

TEST_CASE("recursion tolerates cycles in the category graph") {
  FixtureSource source(fixture_dir());
  SceneCategory scene = scene_for("Old Town Cathedral", "Q110");
  const auto rules = default_rules_for(scene, source, {});
  // "Old Town Cathedral interior" lists "Old Town Cathedral" as a subcategory;
  // the visited set must terminate the walk.
  const CategoryNode tree = recurse_subcategories(scene, source, rules);
  CHECK(tree.children.size() >= 1);
}

TEST_CASE("recursion requires a non-empty substring list") {
  FixtureSource source(fixture_dir());
  SceneCategory scene = scene_for("Old Town Cathedral", "Q110");
  CHECK_THROWS_AS(recurse_subcategories(scene, source, RecursionRules{4, {}, {}}),
                  std::invalid_argument);
}

TEST_CASE("manifest deduplicates by title and flags unlicensed files") {
  FixtureSource source(fixture_dir());
  SceneCategory scene = scene_for("Old Town Cathedral", "Q110");
  const auto rules = default_rules_for(scene, source, {"People associated with"});
  const CategoryNode tree = recurse_subcategories(scene, source, rules);
  const ManifestResult manifest = build_manifest(tree, source);

  // Fixture ground truth: Cath_west (deduped), Cath_east, Cath_altar,
  // Cath_detail1, Cath_closeup, Organ_loft = 6 licensed entries;
  // Cath_unreachable sits at depth 5 and is never visited.
  REQUIRE(manifest.entries.size() == 6);
  std::set<std::string> titles;
  for (const auto& entry : manifest.entries) titles.insert(entry.title);
  CHECK(titles.count("File:Cath_west.jpg") == 1);
  CHECK(titles.count("File:Cath_unreachable.jpg") == 0);

  REQUIRE(manifest.excluded_unlicensed.size() == 1);
  CHECK(manifest.excluded_unlicensed[0].title == "File:Cath_organ.jpg");
}

TEST_CASE("fixture pipeline output is byte-stable across runs") {
  std::string first, second;
  for (std::string* out : {&first, &second}) {
    FixtureSource source(fixture_dir());
    auto scenes = identify_scenes({"Q12280", "Q483453"}, source);
    scenes = cyclic_link_filter(scenes, source);
    scenes = glam_filter(scenes, source, kGlam);
    *out = serialize_scenes(scenes);

    SceneCategory cathedral = scene_for("Old Town Cathedral", "Q110");
    const auto rules =
        default_rules_for(cathedral, source, {"People associated with"});
    const auto tree = recurse_subcategories(cathedral, source, rules);
    *out += serialize_manifest(build_manifest(tree, source));
  }
  CHECK(first == second);
  CHECK(!first.empty());
}

TEST_CASE("entity response parser extracts labels, aliases, claims") {
  const std::string body = R"({
    "entities": {
      "Q1": {
        "labels": {"en": {"value": "Eiffel Tower"}},
        "aliases": {"en": [{"value": "La Tour Eiffel"}]},
        "claims": {
          "P31": [{"mainsnak": {"datavalue": {"value": {"id": "Q12280"}}}}],
          "P373": [{"mainsnak": {"datavalue": {"value": "Eiffel Tower"}}}]
        }
      }
    }
  })";
  const auto entity = api::parse_entity_response(body, "Q1");
  REQUIRE(entity.has_value());
  CHECK(entity->label == "Eiffel Tower");
  REQUIRE(entity->aliases.size() == 1);
  CHECK(entity->aliases[0] == "La Tour Eiffel");
  REQUIRE(entity->instance_of.size() == 1);
  CHECK(entity->instance_of[0] == "Q12280");
  REQUIRE(entity->commons_category.has_value());
  CHECK(*entity->commons_category == "Eiffel Tower");

  CHECK_FALSE(api::parse_entity_response(R"({"entities":{}})", "Q1").has_value());
  CHECK_FALSE(api::parse_entity_response(
                  R"({"entities":{"Q1":{"missing":""}}})", "Q1")
                  .has_value());
}

TEST_CASE("category member parser strips prefixes and reads continuation") {
  const std::string body = R"({
    "continue": {"cmcontinue": "page|next"},
    "query": {"categorymembers": [
      {"title": "Category:Bridges at night"},
      {"title": "File:Photo.jpg"}
    ]}
  })";
  const auto members = api::parse_category_members(body);
  REQUIRE(members.titles.size() == 2);
  CHECK(members.titles[0] == "Bridges at night");
  CHECK(members.titles[1] == "File:Photo.jpg");
  CHECK(members.continue_token == "page|next");
}

TEST_CASE("pageprops parser returns the linked entity") {
  const std::string body = R"({
    "query": {"pages": {"123": {"pageprops": {"wikibase_item": "Q42"}}}}
  })";
  CHECK(api::parse_pageprops_entity(body) == std::optional<std::string>("Q42"));
  CHECK_FALSE(api::parse_pageprops_entity(R"({"query":{"pages":{}}})"));
}

TEST_CASE("imageinfo parser reads url, timestamp, license") {
  const std::string body = R"({
    "query": {"pages": {"5": {
      "title": "File:Photo.jpg",
      "imageinfo": [{
        "url": "https://upload.example/Photo.jpg",
        "timestamp": "2020-01-01T00:00:00Z",
        "extmetadata": {"LicenseShortName": {"value": "CC BY-SA 4.0"}}
      }]
    }}}
  })";
  const auto files = api::parse_imageinfo(body);
  REQUIRE(files.size() == 1);
  CHECK(files[0].title == "File:Photo.jpg");
  CHECK(files[0].url == "https://upload.example/Photo.jpg");
  CHECK(files[0].license == "CC BY-SA 4.0");
}

TEST_CASE("sparql parser strips the entity URI prefix") {
  const std::string body = R"({
    "results": {"bindings": [
      {"x": {"value": "http://www.wikidata.org/entity/Q7"}},
      {"x": {"value": "http://www.wikidata.org/entity/Q8"}}
    ]}
  })";
  const auto ids = api::parse_sparql_ids(body);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == "Q7");
  CHECK(ids[1] == "Q8");
}

TEST_CASE("url encoding escapes reserved characters") {
  CHECK(api::url_encode("Category:Bridges at night") ==
        "Category%3ABridges%20at%20night");
  CHECK(api::url_encode("safe-_.~chars") == "safe-_.~chars");
}

TEST_CASE("live source requires a user agent") {
  LiveConfig config;
  config.user_agent = "";
  CHECK_THROWS_AS(LiveSource{config}, std::invalid_argument);
}
