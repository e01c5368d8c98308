#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/reporting.hpp"

using namespace agone;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = AGONE_TEST_FIXTURES_DIR;

fs::path scratch(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("agone_report_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

metrics::PerClassMetrics sample_row() {
  metrics::PerClassMetrics row;
  row.model = "gemini-1.5-pro";
  row.prompt_name = "few-shot";
  row.project = "145256500";
  row.cut_fqn = "com.example.Key";
  row.build = true;
  row.branch_coverage = 57.142857;
  row.line_coverage = 81.081081;
  row.method_coverage = 85.616438;
  row.mutation_score = 33.333333;
  row.smells = metrics::zeroed_smells();
  row.smells["AR"] = 10;
  row.smells["MNT"] = 9;
  row.smells_measured = true;
  return row;
}

}  // namespace

TEST_CASE("csv header is the canonical 27-column schema") {
  std::string header = report::kCsvHeader;
  CHECK(header ==
        "model,prompt_name,project,class_under_test,branch_coverage,line_coverage,"
        "method_coverage,mutation_score,AR,CTL,CI,DT,DA,EA,EM,EH,GF,IT,LT,MNT,MG,RP,RA,RO,SE,ST,"
        "UT");
  CHECK(detail::split(header, ',').size() == 27);
}

TEST_CASE("report rows render two-decimal percentages and smell counts") {
  auto row = report::row_from_metrics(sample_row());
  CHECK(row.class_under_test == "Key");
  CHECK(row.branch_coverage == "57.14");
  CHECK(row.line_coverage == "81.08");
  CHECK(row.method_coverage == "85.62");
  CHECK(row.mutation_score == "33.33");
  CHECK(row.smells[0] == 10);   // AR
  CHECK(row.smells[11] == 9);   // MNT

  auto dir = scratch("row");
  report::emit_csv({row}, dir / "report.csv");
  auto text = detail::read_file(dir / "report.csv");
  CHECK(detail::contains(text,
                         "gemini-1.5-pro,few-shot,145256500,Key,57.14,81.08,85.62,33.33,10,"));
  fs::remove_all(dir);
}

TEST_CASE("undefined metrics render as dashes") {
  metrics::PerClassMetrics row = sample_row();
  row.model = "human";
  row.prompt_name = "-";
  row.cut_fqn = "com.example.io.FileHandler";
  row.branch_coverage.reset();
  row.line_coverage = 100.0;
  row.method_coverage = 100.0;
  row.mutation_score = 100.0;
  auto rendered = report::row_from_metrics(row);
  CHECK(rendered.branch_coverage == "-");
  CHECK(rendered.line_coverage == "100.00");

  auto dir = scratch("dash");
  report::emit_csv({rendered}, dir / "report.csv");
  CHECK(detail::contains(detail::read_file(dir / "report.csv"),
                         "human,-,145256500,FileHandler,-,100.00,100.00,100.00,"));
  fs::remove_all(dir);
}

TEST_CASE("an empty row set emits a header-only file") {
  auto dir = scratch("empty");
  report::emit_csv({}, dir / "report.csv");
  auto lines = detail::split_lines(detail::read_file(dir / "report.csv"));
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == report::kCsvHeader);
  fs::remove_all(dir);
}

TEST_CASE("parsing an emitted csv reproduces the rows exactly") {
  auto dir = scratch("roundtrip");
  std::vector<report::ReportRow> rows;
  rows.push_back(report::row_from_metrics(sample_row()));
  auto second = sample_row();
  second.model = "human";
  second.prompt_name = "-";
  second.branch_coverage.reset();
  rows.push_back(report::row_from_metrics(second));

  report::emit_csv(rows, dir / "report.csv");
  auto parsed = report::parse_csv(dir / "report.csv");
  CHECK(parsed == rows);
  fs::remove_all(dir);
}

TEST_CASE("project identifiers are stable and numeric") {
  auto a = report::project_id("/repos/toy");
  auto b = report::project_id("/repos/toy");
  auto c = report::project_id("/repos/other");
  CHECK(a == b);
  CHECK(a != c);
  for (char ch : a) CHECK(std::isdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("ledger jsonl round-trips rows with undefined metrics") {
  auto dir = scratch("ledger");
  metrics::EvaluationLedger ledger;
  ledger.rows.push_back(sample_row());
  auto failed = sample_row();
  failed.build = false;
  failed.branch_coverage.reset();
  failed.line_coverage.reset();
  failed.method_coverage.reset();
  failed.mutation_score.reset();
  failed.smells_measured = false;
  failed.smells = metrics::zeroed_smells();
  ledger.rows.push_back(failed);

  report::write_ledger_jsonl(ledger, dir / "ledger.jsonl");
  auto loaded = report::read_ledger_jsonl(dir / "ledger.jsonl");
  REQUIRE(loaded.rows.size() == 2);
  CHECK(loaded.rows[0] == ledger.rows[0]);
  CHECK(loaded.rows[1] == ledger.rows[1]);
  fs::remove_all(dir);
}

TEST_CASE("outcomes jsonl round-trips optional fields") {
  auto dir = scratch("outcomes");
  gateway::GenerationOutcome ok;
  ok.model = "m";
  ok.prompt_name = "p";
  ok.project = "1";
  ok.cut_fqn = "a.B";
  ok.raw_response = "```java\nclass BTest {}\n```";
  ok.extracted_source = "class BTest {}";
  ok.placed_path = "src/test/java/a/BTest.java";
  ok.status = "ok";

  gateway::GenerationOutcome failed;
  failed.model = "m";
  failed.prompt_name = "p";
  failed.project = "1";
  failed.cut_fqn = "a.C";
  failed.raw_response = "no code here";
  failed.status = "extraction_failed";
  failed.error_detail = "no parseable top-level type in the response";

  report::write_outcomes_jsonl({ok, failed}, dir / "outcomes.jsonl");
  auto loaded = report::read_outcomes_jsonl(dir / "outcomes.jsonl");
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == ok);
  CHECK(loaded[1] == failed);
  fs::remove_all(dir);
}

TEST_CASE("pipeline stages run the bundled toy project deterministically") {
  auto dir = scratch("pipeline");
  auto project = dir / "toyproject";
  fs::copy(kFixtures / "e2e/toyproject", project, fs::copy_options::recursive);

  report::PipelineOptions options;
  options.config_path = kFixtures / "e2e/config.yaml";
  options.mode = "replay";

  auto run_all = [&](const fs::path& workdir) {
    options.workdir = workdir;
    report::stage_mine(project.string(), "", options);
    options.provider = "replay";
    options.replay_dir = kFixtures / "e2e/replay/responses";
    report::stage_generate(options);
    options.replay_dir = kFixtures / "e2e/replay/runner";
    report::stage_evaluate(options);
    report::stage_report(options);
  };

  run_all(dir / "run1");
  run_all(dir / "run2");

  auto first = detail::read_file(dir / "run1/report.csv");
  auto second = detail::read_file(dir / "run2/report.csv");
  CHECK(first == second);
  CHECK(detail::split_lines(first)[0] == report::kCsvHeader);

  // the dataset captured both classes under test
  auto dataset = miner::read_dataset_jsonl(dir / "run1/classes2test.jsonl");
  CHECK(dataset.size() == 2);

  // the flagship generated row carries the staged measurements
  bool found_gemini_key = false;
  for (const auto& row : report::parse_csv(dir / "run1/report.csv")) {
    if (row.model == "gemini-1.5-pro" && row.prompt_name == "few-shot" &&
        row.class_under_test == "Key") {
      found_gemini_key = true;
      CHECK(row.branch_coverage == "57.14");
      CHECK(row.line_coverage == "81.08");
      CHECK(row.method_coverage == "85.62");
      CHECK(row.mutation_score == "33.33");
    }
    if (row.model == "human" && row.class_under_test == "FileHandler") {
      CHECK(row.branch_coverage == "-");
      CHECK(row.line_coverage == "100.00");
      CHECK(row.mutation_score == "100.00");
    }
  }
  CHECK(found_gemini_key);

  // aggregate and manifest came out of the report stage
  CHECK(fs::exists(dir / "run1/aggregate.csv"));
  CHECK(fs::exists(dir / "run1/manifest.json"));
  CHECK(fs::exists(dir / "run1/errors_profile.json"));
  auto profile_text = detail::read_file(dir / "run1/errors_profile.json");
  CHECK(detail::contains(profile_text, "SymbolNotFound"));
  fs::remove_all(dir);
}

TEST_CASE("evaluate fails loudly when a replay fixture is missing") {
  auto dir = scratch("missing_fixture");
  auto project = dir / "toyproject";
  fs::copy(kFixtures / "e2e/toyproject", project, fs::copy_options::recursive);

  report::PipelineOptions options;
  options.workdir = dir / "work";
  options.config_path = kFixtures / "e2e/config.yaml";
  options.mode = "replay";
  report::stage_mine(project.string(), "", options);
  options.provider = "replay";
  options.replay_dir = kFixtures / "e2e/replay/responses";
  report::stage_generate(options);

  options.replay_dir = dir / "empty_replay";  // no manifest at all
  CHECK_THROWS_AS(report::stage_evaluate(options), runner::MissingReplayFixture);
  fs::remove_all(dir);
}
