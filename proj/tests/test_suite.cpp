#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "treeshift/suite.hpp"

using namespace treeshift;

namespace {

const char* kMinimalConfig = R"({
  "suite": "minimal",
  "tree": "two_ray",
  "family": {"type": "bergman", "a": 2},
  "depth": 24,
  "seed": 7
})";

SuiteConfig fast_config() {
    // Minimum supported horizon and a short radius sweep; the boundary grid
    // stays at 1024 so the von Neumann grid-gap margin keeps its headroom.
    SuiteConfig config = SuiteConfig::from_json_text(kMinimalConfig);
    config.sweep_points = 6;
    return config;
}

}  // namespace

TEST_CASE("config parsing: minimal document and defaults") {
    const SuiteConfig config = SuiteConfig::from_json_text(kMinimalConfig);
    CHECK(config.suite == "minimal");
    CHECK(config.tree == "two_ray");
    CHECK(config.family == "bergman");
    CHECK(config.a == 2);
    CHECK(config.depth == 24);
    CHECK(config.seed == 7);
    CHECK(config.boundary_points == 1024);
    CHECK(config.sweep_points == 15);
    CHECK(config.max_radius == 0.9);
    CHECK(config.tol_vn == 1e-3);
    CHECK(config.out_dir.empty());
    config.validate();
}

TEST_CASE("config parsing: full document with grid and tolerances") {
    const SuiteConfig config = SuiteConfig::from_json_text(R"({
      "suite": "full",
      "tree": "two_ray",
      "family": {"type": "two_parameter", "s": 0.7, "t": 0.5},
      "depth": 32,
      "seed": 99,
      "grid": {"boundary_points": 2048, "sweep_points": 21, "max_radius": 0.8},
      "tolerances": {"vn": 2e-3, "recovery": 1e-7},
      "out_dir": "/tmp/somewhere"
    })");
    CHECK(config.family == "two_parameter");
    CHECK(config.s == 0.7);
    CHECK(config.t == 0.5);
    CHECK(config.boundary_points == 2048);
    CHECK(config.sweep_points == 21);
    CHECK(config.max_radius == 0.8);
    CHECK(config.tol_vn == 2e-3);
    CHECK(config.tol_recovery == 1e-7);
    CHECK(config.tol_gram == 1e-10);  // untouched default
    CHECK(config.out_dir == "/tmp/somewhere");
}

TEST_CASE("config parsing rejects malformed documents") {
    // Unknown keys at every level.
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2},
      "depth": 24, "seed": 1, "bogus": true})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2, "s": 1},
      "depth": 24, "seed": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2},
      "depth": 24, "seed": 1, "grid": {"points": 9}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2},
      "depth": 24, "seed": 1, "tolerances": {"vnn": 1e-3}})"),
                    std::invalid_argument);
    // Missing required keys.
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "tree": "path", "family": {"type": "bergman", "a": 2}, "depth": 24, "seed": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "depth": 24, "seed": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "two_parameter", "s": 0.7},
      "depth": 24, "seed": 1})"),
                    std::invalid_argument);
    // Wrong types and domains.
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2},
      "depth": "24", "seed": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text(R"({
      "suite": "x", "tree": "path", "family": {"type": "bergman", "a": 2},
      "depth": 24, "seed": -4})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text("not a json document"),
                    std::invalid_argument);
    CHECK_THROWS_AS(SuiteConfig::from_json_text("[1, 2, 3]"), std::invalid_argument);
}

TEST_CASE("config validation enforces the documented ranges") {
    SuiteConfig config = SuiteConfig::from_json_text(kMinimalConfig);
    config.validate();

    SuiteConfig shallow = config;
    shallow.depth = 23;
    CHECK_THROWS_AS(shallow.validate(), std::invalid_argument);

    SuiteConfig radius = config;
    radius.max_radius = 1.0;
    CHECK_THROWS_AS(radius.validate(), std::invalid_argument);

    SuiteConfig tol = config;
    tol.tol_vn = 0.0;
    CHECK_THROWS_AS(tol.validate(), std::invalid_argument);

    SuiteConfig coarse = config;
    coarse.boundary_points = 32;
    CHECK_THROWS_AS(coarse.validate(), std::invalid_argument);

    SuiteConfig exponent = config;
    exponent.a = 1;
    CHECK_THROWS_AS(exponent.validate(), std::invalid_argument);

    // The two-parameter family needs the two-ray tree.
    SuiteConfig mismatch = config;
    mismatch.tree = "path";
    mismatch.family = "two_parameter";
    mismatch.s = 0.7;
    mismatch.t = 0.5;
    CHECK_THROWS_AS(mismatch.validate(), std::invalid_argument);

    SuiteConfig unknown_tree = config;
    unknown_tree.tree = "ring";
    CHECK_THROWS_AS(unknown_tree.validate(), std::invalid_argument);
}

TEST_CASE("presets parse, validate, and round-trip through JSON") {
    const auto names = suite_preset_names();
    REQUIRE(names.size() == 4);
    for (const std::string& name : names) {
        const SuiteConfig config = SuiteConfig::preset(name);
        config.validate();
        CHECK(config.suite == name);
        const SuiteConfig reparsed = SuiteConfig::from_json_text(config.to_json());
        CHECK(reparsed.to_json() == config.to_json());
    }
    CHECK_THROWS_AS(SuiteConfig::preset("no-such-preset"), std::invalid_argument);
    try {
        SuiteConfig::preset("no-such-preset");
    } catch (const std::invalid_argument& err) {
        // The error names the available presets.
        for (const std::string& name : names) {
            CHECK(std::string(err.what()).find(name) != std::string::npos);
        }
    }
}

TEST_CASE("suite run: all checks pass on a fast configuration") {
    const SuiteConfig config = fast_config();
    const SuiteResult result = run_suite(config);
    CHECK(result.exit_status == 0);
    CHECK(result.all_pass);
    REQUIRE(!result.checks.empty());
    for (const SuiteCheck& check : result.checks) {
        CHECK(check.pass);
        CHECK(!check.name.empty());
        CHECK(!check.comparison.empty());
    }
    // Bergman runs emit exactly the three core reports.
    REQUIRE(result.files.size() == 3);
    CHECK(result.files.count("summary.json") == 1);
    CHECK(result.files.count("condition_sweep.csv") == 1);
    CHECK(result.files.count("vn_defects.csv") == 1);
}

TEST_CASE("suite run: outputs are deterministic and policy-independent") {
    const SuiteConfig config = fast_config();
    const SuiteResult first = run_suite(config, Exec::serial);
    const SuiteResult second = run_suite(config, Exec::serial);
    const SuiteResult parallel = run_suite(config, Exec::openmp);
    CHECK(first.files == second.files);
    CHECK(first.files == parallel.files);

    SuiteConfig reseeded = config;
    reseeded.seed = config.seed + 1;
    const SuiteResult other = run_suite(reseeded);
    CHECK(first.files != other.files);
}

TEST_CASE("suite run: summary JSON carries config echo and all checks") {
    const SuiteConfig config = fast_config();
    const SuiteResult result = run_suite(config);
    const nlohmann::json summary = nlohmann::json::parse(result.files.at("summary.json"));
    CHECK(summary.at("suite").get<std::string>() == "minimal");
    CHECK(summary.at("seed").get<std::uint64_t>() == 7);
    CHECK(summary.at("all_pass").get<bool>());
    CHECK(summary.at("exit_status").get<int>() == 0);
    CHECK(summary.at("family").get<std::string>() == "bergman");
    CHECK(summary.at("tree").get<std::string>() == "two_ray");
    REQUIRE(summary.at("checks").is_array());
    CHECK(summary.at("checks").size() == result.checks.size());
    for (const auto& check : summary.at("checks")) {
        CHECK(check.contains("name"));
        CHECK(check.contains("pass"));
        CHECK(check.contains("value"));
        CHECK(check.contains("threshold"));
        CHECK(check.contains("comparison"));
    }
    // The config echo reproduces the input but never leaks the output path.
    const auto& echo = summary.at("config");
    CHECK(echo.at("depth").get<int>() == 24);
    CHECK(!echo.contains("out_dir"));

    // CSV reports start with the seed comment and the frozen header.
    const std::string& csv = result.files.at("condition_sweep.csv");
    CHECK(csv.rfind("# seed=7\nabs_w,mu_min,mu_max,ratio,bound\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          2 + config.sweep_points);  // comment + header + one row per radius
    const std::string& defects = result.files.at("vn_defects.csv");
    CHECK(defects.rfind("# seed=7\nindex,degree,defect\n", 0) == 0);
}

TEST_CASE("suite run: two-parameter family adds the hyponormality grid") {
    SuiteConfig config = SuiteConfig::from_json_text(R"({
      "suite": "tp",
      "tree": "two_ray",
      "family": {"type": "two_parameter", "s": 0.70710678118654752, "t": 0.5},
      "depth": 24,
      "seed": 3
    })");
    config.sweep_points = 6;
    const SuiteResult result = run_suite(config);
    CHECK(result.exit_status == 0);
    REQUIRE(result.files.count("hyponormality_grid.csv") == 1);
    const std::string& grid = result.files.at("hyponormality_grid.csv");
    CHECK(grid.rfind("# seed=3\ns,t,min_eigenvalue\n", 0) == 0);
    // The scan certifies non-hyponormality at every grid point.
    bool found_violation_check = false;
    for (const SuiteCheck& check : result.checks) {
        if (check.name == "hyponormality_grid_min") {
            found_violation_check = true;
            CHECK(check.pass);
            CHECK(check.value < -1e-3);
        }
    }
    CHECK(found_violation_check);
}

TEST_CASE("write_suite_files persists every report byte-for-byte") {
    const SuiteConfig config = fast_config();
    const SuiteResult result = run_suite(config);
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "treeshift-suite-test";
    std::filesystem::remove_all(dir);
    write_suite_files(result, dir.string());
    for (const auto& [name, content] : result.files) {
        std::ifstream in(dir / name, std::ios::binary);
        REQUIRE(in.good());
        std::string on_disk((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(on_disk == content);
    }
    std::filesystem::remove_all(dir);
}
