#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agone/errors.hpp"
#include "agone/llm_gateway.hpp"
#include "agone/metrics_engine.hpp"
#include "agone/repo_miner.hpp"
#include "agone/test_runner.hpp"

// Report emission (per-class CSV, aggregate tables, delta tables, error
// profiles) and the resumable pipeline stages behind the CLI subcommands.
namespace agone::report {

AGONE_DEFINE_ERROR(WriteFailed);
AGONE_DEFINE_ERROR(MissingInput);

// Fixed 27-column schema.
extern const char* kCsvHeader;

// One emitted report line. Metric cells hold their rendered form ("-" or a
// two-decimal percentage) so a parsed CSV reproduces the rows exactly.
struct ReportRow {
  std::string model;
  std::string prompt_name;  // "-" for human baseline rows
  std::string project;
  std::string class_under_test;  // simple name
  std::string branch_coverage;
  std::string line_coverage;
  std::string method_coverage;
  std::string mutation_score;
  std::array<int, 19> smells{};  // canonical order AR..UT

  bool operator==(const ReportRow&) const = default;
};

std::string format_percentage(const std::optional<double>& value);  // "-" when undefined
ReportRow row_from_metrics(const metrics::PerClassMetrics& row);

void emit_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& out_file);
std::vector<ReportRow> parse_csv(const std::filesystem::path& in_file);

void emit_aggregate_csv(const metrics::AggregateReport& report,
                        const std::filesystem::path& out_file);
void emit_deltas_csv(
    const std::map<std::pair<std::string, std::string>, std::map<std::string, double>>& deltas,
    const std::filesystem::path& out_file);
void emit_errors_profile_json(const runner::ErrorProfile& profile,
                              const std::filesystem::path& out_file);

struct RunManifest {
  std::string config_digest;
  std::string dataset_digest;
  std::map<std::string, std::string> tool_versions;
  std::string mode;
  std::string created_at;  // ISO-8601 UTC

  // timestamp-independent identity
  bool equivalent_to(const RunManifest& other) const {
    return config_digest == other.config_digest && dataset_digest == other.dataset_digest &&
           tool_versions == other.tool_versions && mode == other.mode;
  }
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_file);

// ---------------------------------------------------------------------------
// pipeline stages; every stage reads the previous stage's serialized output

struct PipelineOptions {
  std::filesystem::path workdir;  // stage artifacts: classes2test.jsonl,
                                  // outcomes.jsonl, ledger.jsonl, reports
  std::filesystem::path config_path;
  std::string mode = "replay";      // live | replay (build phases)
  std::string provider = "replay";  // http | mock | replay (completions)
  std::filesystem::path replay_dir;  // {model}/{prompt}/{fqn}.txt responses
                                     // plus the runner's manifest.json
  std::string base_url;              // http provider endpoint
  std::string api_key_ref;           // env var name for the http provider
  std::string policy_override;       // "", compiled_only, zero_penalized
  std::string fallback = "fail";     // token-budget fallback strategy
  std::map<std::string, std::string> custom_vars;
  std::filesystem::path baseline_ledger;  // enables the delta table
  bool require_build = false;
  bool include_human = true;
  int concurrency = 4;
  std::chrono::seconds compile_timeout{300};
  std::chrono::seconds mutation_timeout{1800};
};

void stage_mine(const std::string& repo, const std::string& branch,
                const PipelineOptions& options);
void stage_generate(const PipelineOptions& options);
void stage_evaluate(const PipelineOptions& options);
void stage_report(const PipelineOptions& options);

// outcomes.jsonl io (stage artifact)
void write_outcomes_jsonl(const std::vector<gateway::GenerationOutcome>& outcomes,
                          const std::filesystem::path& out_file);
std::vector<gateway::GenerationOutcome> read_outcomes_jsonl(const std::filesystem::path& in_file);

// ledger.jsonl io (stage artifact)
void write_ledger_jsonl(const metrics::EvaluationLedger& ledger,
                        const std::filesystem::path& out_file);
metrics::EvaluationLedger read_ledger_jsonl(const std::filesystem::path& in_file);

// stable numeric project identifier for report rows
std::string project_id(const std::string& repo_locator);

}  // namespace agone::report
