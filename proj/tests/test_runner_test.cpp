#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "agone/detail/fs.hpp"
#include "agone/metrics_engine.hpp"
#include "agone/test_runner.hpp"

using namespace agone;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = AGONE_TEST_FIXTURES_DIR;

fs::path fresh_temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("agone_runner_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("classify_error follows the ordered rule table") {
  using runner::ErrorCategory;
  CHECK(runner::classify_error("cannot find symbol: method encode()") ==
        ErrorCategory::SymbolNotFound);
  CHECK(runner::classify_error("package org.junit does not exist") ==
        ErrorCategory::MissingImport);
  CHECK(runner::classify_error("cannot assign a value to final variable x") ==
        ErrorCategory::FinalVariableIssue);
  CHECK(runner::classify_error(
            "method does not override or implement a method from a supertype") ==
        ErrorCategory::OverrideIssue);
  CHECK(runner::classify_error("encode() has private access in Key") ==
        ErrorCategory::VisibilityIssue);
  CHECK(runner::classify_error("incompatible types: String cannot be converted to int") ==
        ErrorCategory::TypeMismatch);
  CHECK(runner::classify_error("Key is abstract; cannot be instantiated") ==
        ErrorCategory::InstantiationIssue);
  CHECK(runner::classify_error(
            "constructor Key in class Key cannot be applied to given types") ==
        ErrorCategory::InstantiationIssue);
  CHECK(runner::classify_error("';' expected") == ErrorCategory::SyntaxError);
  CHECK(runner::classify_error("illegal start of expression") == ErrorCategory::SyntaxError);
  CHECK(runner::classify_error("warning: deprecated API") == ErrorCategory::Other);
}

TEST_CASE("group function is fixed by category") {
  using runner::ErrorCategory;
  using runner::ErrorGroup;
  CHECK(runner::group_of(ErrorCategory::SymbolNotFound) == ErrorGroup::symbol_reference);
  CHECK(runner::group_of(ErrorCategory::MissingImport) == ErrorGroup::symbol_reference);
  CHECK(runner::group_of(ErrorCategory::OverrideIssue) == ErrorGroup::structure_consistency);
  CHECK(runner::group_of(ErrorCategory::VisibilityIssue) == ErrorGroup::structure_consistency);
  CHECK(runner::group_of(ErrorCategory::TypeMismatch) == ErrorGroup::structure_consistency);
  CHECK(runner::group_of(ErrorCategory::InstantiationIssue) == ErrorGroup::structure_consistency);
  CHECK(runner::group_of(ErrorCategory::SyntaxError) == ErrorGroup::syntax_rules);
  CHECK(runner::group_of(ErrorCategory::FinalVariableIssue) == ErrorGroup::syntax_rules);
  CHECK(runner::group_of(ErrorCategory::Other) == ErrorGroup::other);
}

TEST_CASE("classification is total over arbitrary text") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> ch(32, 126);
  for (int i = 0; i < 500; ++i) {
    std::string junk;
    for (int j = 0; j < 40; ++j) junk.push_back(static_cast<char>(ch(rng)));
    CHECK_NOTHROW(runner::classify_error(junk));
  }
}

TEST_CASE("parse_diagnostics extracts file, line, and message") {
  auto errors = runner::parse_diagnostics(
      "src/test/java/com/example/KeyTest.java:17: error: cannot find symbol\n"
      "  symbol:   method encode()\n"
      "src/test/java/com/example/KeyTest.java:31: error: ';' expected\n"
      "2 errors\n");
  REQUIRE(errors.size() == 2);
  CHECK(errors[0].file == "src/test/java/com/example/KeyTest.java");
  CHECK(errors[0].line == 17);
  CHECK(errors[0].category == runner::ErrorCategory::SymbolNotFound);
  CHECK(errors[1].line == 31);
  CHECK(errors[1].category == runner::ErrorCategory::SyntaxError);
}

TEST_CASE("error_profile splits evenly for a two-by-two corpus") {
  std::vector<runner::CompilationError> errors;
  for (int i = 0; i < 2; ++i) {
    errors.push_back({"", 0, "cannot find symbol", runner::ErrorCategory::SymbolNotFound});
    errors.push_back({"", 0, "';' expected", runner::ErrorCategory::SyntaxError});
  }
  auto profile = runner::error_profile(errors);
  CHECK(profile.total == 4);
  CHECK(profile.category_percentages.at(runner::ErrorCategory::SymbolNotFound) ==
        doctest::Approx(50.0));
  CHECK(profile.category_percentages.at(runner::ErrorCategory::SyntaxError) ==
        doctest::Approx(50.0));

  // group totals equal the sums of their member category counts
  CHECK(profile.group_counts.at(runner::ErrorGroup::symbol_reference) == 2);
  CHECK(profile.group_counts.at(runner::ErrorGroup::syntax_rules) == 2);
  CHECK(profile.group_counts.at(runner::ErrorGroup::structure_consistency) == 0);

  double sum = 0;
  for (const auto& [cat, pct] : profile.category_percentages) sum += pct;
  CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("error_profile rejects an empty input") {
  CHECK_THROWS_AS(runner::error_profile({}), runner::EmptyInput);
}

TEST_CASE("replay compile run carries the staged diagnostics") {
  auto dir = fresh_temp_dir("replay");
  detail::write_file(dir / "diag/key.txt",
                     "KeyTest.java:4: error: cannot find symbol\n1 error\n");
  detail::write_file(dir / "manifest.json", R"({
    "entries": [
      {"model": "gpt-4o-mini", "prompt": "zero-shot", "cut_fqn": "com.example.Key",
       "phase": "compile", "exit_ok": false, "stderr_file": "diag/key.txt"}
    ]
  })");

  runner::RunnerOptions options;
  options.mode = runner::Mode::replay;
  options.replay_root = dir;
  auto run = runner::run_phase("/toy", runner::Phase::compile, options,
                               {"gpt-4o-mini", "zero-shot", "com.example.Key"});
  CHECK_FALSE(run.exit_ok);
  CHECK(run.stderr_text ==
        detail::read_file(dir / "diag/key.txt"));
  fs::remove_all(dir);
}

TEST_CASE("replay coverage run stages the fixture artifact") {
  auto dir = fresh_temp_dir("replay_cov");
  fs::copy_file(kFixtures / "reports/simple_coverage.xml", dir / "cov.xml");
  detail::write_file(dir / "manifest.json", R"({
    "entries": [
      {"model": "m", "prompt": "p", "cut_fqn": "com.example.Plain",
       "phase": "coverage", "exit_ok": true, "artifacts": ["cov.xml"]}
    ]
  })");

  runner::RunnerOptions options;
  options.mode = runner::Mode::replay;
  options.replay_root = dir;
  auto run =
      runner::run_phase("/toy", runner::Phase::coverage, options, {"m", "p", "com.example.Plain"});
  CHECK(run.exit_ok);
  REQUIRE(run.artifacts.size() == 1);

  // artifact-path independence: parsing through the staged artifact matches
  // parsing the fixture directly
  auto via_replay = metrics::parse_coverage_report(run.artifacts[0], "com.example.Plain");
  auto direct = metrics::parse_coverage_report(kFixtures / "reports/simple_coverage.xml",
                                               "com.example.Plain");
  CHECK(via_replay.line == direct.line);
  CHECK(via_replay.method == direct.method);
  fs::remove_all(dir);
}

TEST_CASE("missing replay fixture is reported with its key") {
  auto dir = fresh_temp_dir("replay_missing");
  detail::write_file(dir / "manifest.json", R"({"entries": []})");
  runner::RunnerOptions options;
  options.mode = runner::Mode::replay;
  options.replay_root = dir;
  CHECK_THROWS_AS(
      runner::run_phase("/toy", runner::Phase::compile, options, {"m", "p", "x.Y"}),
      runner::MissingReplayFixture);
  fs::remove_all(dir);
}

TEST_CASE("live mode with no build tool fails fast") {
  auto dir = fresh_temp_dir("live_notool");
  detail::write_file(dir / "pom.xml", "<project></project>");
  runner::RunnerOptions options;
  options.mode = runner::Mode::live;
  options.maven_path = "/nonexistent/bin/mvn";
  CHECK_THROWS_AS(runner::run_phase(dir, runner::Phase::compile, options),
                  runner::ToolNotFound);
  fs::remove_all(dir);
}

TEST_CASE("live phases are bounded by the wall-clock limit") {
  auto dir = fresh_temp_dir("live_timeout");
  detail::write_file(dir / "pom.xml", "<project></project>");
  auto tool = dir / "slow_tool.sh";
  detail::write_file(tool, "#!/bin/sh\nsleep 5\n");
  fs::permissions(tool, fs::perms::owner_all);

  runner::RunnerOptions options;
  options.mode = runner::Mode::live;
  options.maven_path = tool.string();
  options.compile_timeout = std::chrono::seconds(1);
  auto run = runner::run_phase(dir, runner::Phase::compile, options);
  CHECK_FALSE(run.exit_ok);
  CHECK(run.stderr_text.find("timed out") != std::string::npos);
  CHECK(run.duration_ms < 4000);
  fs::remove_all(dir);
}
