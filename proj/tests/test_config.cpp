#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "testutil.hpp"
#include "viewprep/config.hpp"

using namespace viewprep;

TEST_CASE("config file values override defaults") {
  testutil::TempDir dir("config");
  {
    std::ofstream out(dir.path / "viewprep.conf");
    out << "# comment\n"
        << "min_shared=75\n"
        << "inlier_threshold=0.1\n"
        << "scale_only=true\n"
        << "sentinel_rgb=1,2,3\n";
  }
  PipelineConfig cfg;
  cfg.load(dir.path / "viewprep.conf");
  CHECK(cfg.min_shared == 75);
  CHECK(cfg.inlier_threshold == 0.1);
  CHECK(cfg.scale_only);
  CHECK(cfg.sentinel_rgb == std::array<uint8_t, 3>{1, 2, 3});
  CHECK(cfg.max_dt == 10800);  // untouched default
}

TEST_CASE("unknown config keys are rejected") {
  testutil::TempDir dir("config_bad");
  {
    std::ofstream out(dir.path / "bad.conf");
    out << "not_a_key=1\n";
  }
  PipelineConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.load(dir.path / "bad.conf"),
                       doctest::Contains("unknown config key"),
                       std::invalid_argument);
}

TEST_CASE("malformed values are rejected with the offending key") {
  testutil::TempDir dir("config_val");
  {
    std::ofstream out(dir.path / "bad.conf");
    out << "min_shared=elephant\n";
  }
  PipelineConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.load(dir.path / "bad.conf"),
                       doctest::Contains("min_shared"), std::invalid_argument);
}

TEST_CASE("dump lists every key and reparses to the same config") {
  PipelineConfig cfg;
  cfg.min_shared = 42;
  cfg.user_agent = "test-agent";
  testutil::TempDir dir("config_dump");
  {
    std::ofstream out(dir.path / "dump.conf");
    out << cfg.dump();
  }
  PipelineConfig back;
  back.load(dir.path / "dump.conf");
  CHECK(back.dump() == cfg.dump());
}

TEST_CASE("key-value records round-trip") {
  KeyValueRecord record;
  record.set("scale", 2.5);
  record.set("name", "value with spaces");
  testutil::TempDir dir("kv");
  record.save(dir.path / "r.meta");
  const KeyValueRecord back = KeyValueRecord::load_file(dir.path / "r.meta");
  CHECK(back.get_double("scale") == 2.5);
  CHECK(back.get("name") == "value with spaces");
  CHECK_THROWS_AS(back.get("absent"), std::out_of_range);
}
