#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "relaxstab/config.hpp"
#include "relaxstab/error.hpp"
#include "relaxstab/pipeline.hpp"

using namespace relaxstab;
namespace fs = std::filesystem;

namespace {

const fs::path kData = RELAXSTAB_TEST_DATA;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("relaxstab_config_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("configuration round trips through JSON") {
  const auto cfg = default_config();
  const auto j = to_json(cfg);
  CHECK(to_json(parse_config(j)) == j);
  CHECK(j["schema_version"] == kSchemaVersion);

  auto edited = j;
  edited["frequency"]["gammas"] = {0.0, 0.1};
  edited["seed"] = 5;
  const auto cfg2 = parse_config(edited);
  CHECK(cfg2.sweep.gammas == std::vector<double>{0.0, 0.1});
  CHECK(cfg2.seed == 5);
}

TEST_CASE("configuration errors name the offending field") {
  CHECK(kind_of([] { load_config(kData / "missing_endstate.json"); }) == ErrorKind::usage);
  CHECK(message_of([] { load_config(kData / "missing_endstate.json"); }).find("w_plus") != std::string::npos);
  CHECK(kind_of([] { load_config(kData / "unknown_key.json"); }) == ErrorKind::usage);

  auto j = to_json(default_config());
  j["schema_version"] = 2;
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::usage);
  j = to_json(default_config());
  j["pipeline"] = "everything";
  CHECK(message_of([&] { parse_config(j); }).find("pipeline") != std::string::npos);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::usage);
}

TEST_CASE("supercharacteristic data is refuted by the hypotheses pipeline") {
  auto cfg = load_config(kData / "supercharacteristic.json");
  cfg.output = scratch("super").string();
  const auto result = run(cfg);
  CHECK(result.exit_status == 4);
  CHECK_FALSE(result.summary["certificates"]["chf"]["pass"].get<bool>());
  CHECK(result.summary["certificates"]["chf"]["theta"].get<double>() < 0.0);
  CHECK(fs::exists(fs::path(cfg.output) / "summary.json"));
  fs::remove_all(cfg.output);
}

TEST_CASE("report merging") {
  auto cfg = default_config();
  cfg.pipeline = "profile";
  const auto a = scratch("merge_a"), b = scratch("merge_b");
  cfg.output = a.string();
  REQUIRE(run(cfg).exit_status == 0);
  cfg.output = b.string();
  cfg.seed = 3;
  REQUIRE(run(cfg).exit_status == 0);

  const auto single = merge_reports({a});
  REQUIRE(single["runs"].size() == 1);
  const auto& c = single["constants"]["profile.residual"];
  CHECK(c["min"] == c["max"]);
  CHECK(c["runs"] == 1);

  const auto both = merge_reports({a, b / "summary.json"});
  CHECK(both["runs"].size() == 2);
  CHECK(both["pass"].get<bool>());

  CHECK(kind_of([] { merge_reports({}); }) == ErrorKind::usage);

  std::ifstream in(b / "summary.json");
  auto doc = nlohmann::json::parse(in);
  doc["tool_version"] = "0.0.0";
  std::ofstream(b / "summary.json") << doc.dump();
  CHECK(kind_of([&] { merge_reports({a, b}); }) == ErrorKind::compatibility);

  fs::remove_all(a);
  fs::remove_all(b);
}
