#include <atomic>
#include <chrono>
#include <ctime>
#include <thread>

#include <nlohmann/json.hpp>

#include "agone/build_config.hpp"
#include "agone/detail/digest.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/prompt_engine.hpp"
#include "agone/reporting.hpp"
#include "agone/token_counter.hpp"

namespace agone::report {

namespace {

using nlohmann::json;

std::string iso8601_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

std::filesystem::path dataset_path(const PipelineOptions& options) {
  return options.workdir / "classes2test.jsonl";
}

std::string repo_key(const std::string& locator, const std::string& branch) {
  return locator + '\n' + branch;
}

std::string read_required(const std::filesystem::path& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw MissingInput(std::string(what) + " not found: " + path.string());
  }
  return detail::read_file(path);
}

// Re-materializes the working copy for a dataset record's repository.
std::filesystem::path working_copy_for(const std::string& locator, const std::string& branch,
                                       const PipelineOptions& options) {
  auto identity = miner::ingest_repo(locator, branch, options.workdir / "checkouts");
  return identity.working_copy;
}

struct JsonLines {
  std::vector<json> lines;
};

JsonLines read_jsonl(const std::filesystem::path& path, const char* what) {
  JsonLines out;
  for (const auto& line : detail::split_lines(read_required(path, what))) {
    if (line.empty()) continue;
    out.lines.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

void write_outcomes_jsonl(const std::vector<gateway::GenerationOutcome>& outcomes,
                          const std::filesystem::path& out_file) {
  std::string buffer;
  for (const auto& o : outcomes) {
    json line = {
        {"model", o.model},
        {"prompt_name", o.prompt_name},
        {"project", o.project},
        {"cut_fqn", o.cut_fqn},
        {"raw_response", o.raw_response},
        {"status", o.status},
        {"latency_ms", o.latency_ms},
        {"error_detail", o.error_detail},
    };
    if (o.extracted_source) line["extracted_source"] = *o.extracted_source;
    if (o.placed_path) line["placed_path"] = *o.placed_path;
    buffer += line.dump();
    buffer += '\n';
  }
  detail::write_file(out_file, buffer);
}

std::vector<gateway::GenerationOutcome> read_outcomes_jsonl(
    const std::filesystem::path& in_file) {
  std::vector<gateway::GenerationOutcome> outcomes;
  for (auto& line : read_jsonl(in_file, "outcomes.jsonl").lines) {
    gateway::GenerationOutcome o;
    o.model = line.value("model", "");
    o.prompt_name = line.value("prompt_name", "");
    o.project = line.value("project", "");
    o.cut_fqn = line.value("cut_fqn", "");
    o.raw_response = line.value("raw_response", "");
    o.status = line.value("status", "");
    o.latency_ms = line.value("latency_ms", 0);
    o.error_detail = line.value("error_detail", "");
    if (line.contains("extracted_source")) o.extracted_source = line["extracted_source"];
    if (line.contains("placed_path")) o.placed_path = line["placed_path"];
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

void write_ledger_jsonl(const metrics::EvaluationLedger& ledger,
                        const std::filesystem::path& out_file) {
  std::string buffer;
  for (const auto& row : ledger.rows) {
    json line = {
        {"model", row.model},       {"prompt_name", row.prompt_name},
        {"project", row.project},   {"cut_fqn", row.cut_fqn},
        {"build", row.build},       {"smells_measured", row.smells_measured},
        {"smells", row.smells},
    };
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (v.has_value()) line[name] = *v;
    };
    put("branch_coverage", row.branch_coverage);
    put("line_coverage", row.line_coverage);
    put("method_coverage", row.method_coverage);
    put("mutation_score", row.mutation_score);
    buffer += line.dump();
    buffer += '\n';
  }
  detail::write_file(out_file, buffer);
}

metrics::EvaluationLedger read_ledger_jsonl(const std::filesystem::path& in_file) {
  metrics::EvaluationLedger ledger;
  for (auto& line : read_jsonl(in_file, "ledger.jsonl").lines) {
    metrics::PerClassMetrics row;
    row.model = line.value("model", "");
    row.prompt_name = line.value("prompt_name", "");
    row.project = line.value("project", "");
    row.cut_fqn = line.value("cut_fqn", "");
    row.build = line.value("build", false);
    row.smells_measured = line.value("smells_measured", false);
    row.smells = metrics::zeroed_smells();
    if (line.contains("smells")) {
      for (const auto& [code, count] : line["smells"].items()) {
        row.smells[code] = count.get<int>();
      }
    }
    auto get = [&](const char* name) -> std::optional<double> {
      if (line.contains(name)) return line[name].get<double>();
      return std::nullopt;
    };
    row.branch_coverage = get("branch_coverage");
    row.line_coverage = get("line_coverage");
    row.method_coverage = get("method_coverage");
    row.mutation_score = get("mutation_score");
    ledger.rows.push_back(std::move(row));
  }
  return ledger;
}

void stage_mine(const std::string& repo, const std::string& branch,
                const PipelineOptions& options) {
  std::filesystem::create_directories(options.workdir);
  auto result = miner::mine_repository(repo, branch, options.workdir / "checkouts");

  if (options.require_build) {
    runner::RunnerOptions ropts;
    ropts.mode = runner::Mode::live;
    ropts.compile_timeout = options.compile_timeout;
    auto baseline = runner::run_phase(result.repo.working_copy, runner::Phase::compile, ropts);
    if (!baseline.exit_ok) {
      throw Error("BaselineBuildFailed",
                  "baseline build of " + repo + " failed; repository dropped");
    }
  }

  miner::write_dataset_jsonl(result.records, dataset_path(options));
  if (!result.records.empty()) {
    miner::write_stats_json(miner::compute_stats(result.records),
                            options.workdir / "stats.json");
  }
  std::string exclusions;
  for (const auto& excluded : result.exclusions) {
    json line = {
        {"cut_fqn", excluded.cut_fqn},
        {"test_fqn", excluded.test_fqn},
        {"reason", miner::to_string(excluded.reason)},
        {"ratio", excluded.ratio},
    };
    exclusions += line.dump();
    exclusions += '\n';
  }
  detail::write_file(options.workdir / "exclusions.jsonl", exclusions);
}

namespace {

std::unique_ptr<gateway::Provider> make_provider(const PipelineOptions& options) {
  if (options.provider == "replay") {
    return std::make_unique<gateway::ReplayProvider>(options.replay_dir);
  }
  if (options.provider == "mock") {
    return std::make_unique<gateway::MockProvider>(
        "```java\npackage com.example;\npublic class GeneratedTest {}\n```");
  }
  if (options.provider == "http") {
    gateway::ProviderEndpoint endpoint;
    endpoint.base_url = options.base_url;
    endpoint.api_key_ref = options.api_key_ref;
    return std::make_unique<gateway::HttpProvider>(endpoint);
  }
  throw Error("UnknownProvider", "unknown provider: " + options.provider);
}

struct GenerationTask {
  const miner::ClassUnderTestRecord* record;
  std::filesystem::path working_copy;
  prompt::PromptVariables vars;
  std::string model;
  double temperature = 0.0;
  const prompt::PromptTemplate* tmpl;
};

}  // namespace

void stage_generate(const PipelineOptions& options) {
  auto config = prompt::load_config(read_required(options.config_path, "config"));
  auto records = miner::read_dataset_jsonl(dataset_path(options));
  prompt::PromptEngine engine(config, prompt::default_token_counter());
  auto provider = make_provider(options);
  const bool timed = options.provider == "http";

  // working copies and build profiles per repository
  std::map<std::string, std::filesystem::path> copies;
  std::map<std::string, std::string> framework_labels, java_versions;
  for (const auto& record : records) {
    std::string key = repo_key(record.repo.url_or_path, record.repo.branch);
    if (copies.count(key)) continue;
    auto copy = working_copy_for(record.repo.url_or_path, record.repo.branch, options);
    copies[key] = copy;
    try {
      auto profile = buildcfg::elicit_profile(copy);
      framework_labels[key] = profile.framework_label();
      java_versions[key] = profile.java_version;
    } catch (const Error&) {
      framework_labels[key] = "unknown";
      java_versions[key] = "unknown";
    }
  }

  // exemplar variables: configured pair or the embedded default
  prompt::PromptVariables exemplar_defaults;
  if (config.exemplar.has_value()) {
    exemplar_defaults.example_class_under_test =
        detail::read_file(config.exemplar->class_under_test);
    exemplar_defaults.example_test_class = detail::read_file(config.exemplar->test_class);
    exemplar_defaults.example_testing_framework = config.exemplar->testing_framework;
    exemplar_defaults.example_java_version = config.exemplar->java_version;
  }
  exemplar_defaults = prompt::with_default_exemplar(std::move(exemplar_defaults));

  std::vector<GenerationTask> tasks;
  for (const auto& record : records) {
    std::string key = repo_key(record.repo.url_or_path, record.repo.branch);
    prompt::PromptVariables vars = exemplar_defaults;
    vars.class_under_test = detail::read_file(copies[key] / record.cut_path);
    vars.testing_framework = framework_labels[key];
    vars.java_version = java_versions[key];
    vars = prompt::build_enhanced_variables(std::move(vars),
                                            record.cut_path.generic_string());
    for (const auto& [name, value] : options.custom_vars) vars.custom[name] = value;

    for (const auto& llm : config.llms) {
      for (const auto& tmpl : config.prompts) {
        tasks.push_back({&record, copies[key], vars, llm.model, llm.temperature, &tmpl});
      }
    }
  }

  auto fallback = prompt::fallback_from_string(options.fallback);
  std::vector<gateway::GenerationOutcome> outcomes(tasks.size());
  std::vector<prompt::InstantiatedPrompt> prompts(tasks.size());
  std::vector<bool> ready(tasks.size(), false);

  for (std::size_t index = 0; index < tasks.size(); ++index) {
    const GenerationTask& task = tasks[index];
    auto& outcome = outcomes[index];
    outcome.model = task.model;
    outcome.prompt_name = task.tmpl->name;
    outcome.project = project_id(task.record->repo.url_or_path);
    outcome.cut_fqn = task.record->cut_fqn;
    try {
      try {
        prompts[index] =
            engine.instantiate(*task.tmpl, task.vars, task.model, task.temperature);
      } catch (const prompt::TokenLimitExceeded&) {
        if (fallback == prompt::FallbackStrategy::fail) throw;
        auto over =
            engine.instantiate_unchecked(*task.tmpl, task.vars, task.model, task.temperature);
        prompts[index] = engine.apply_fallback(over, fallback);
      }
      ready[index] = true;
    } catch (const Error& e) {
      outcome.status = "provider_error";
      outcome.error_detail = std::string(e.code()) + ": " + e.what();
    }
  }

  // completions may be in flight together (per-endpoint cap); everything
  // after the provider call is sequential in task order
  auto fetch = [&](std::size_t index) {
    if (!ready[index]) return;
    const GenerationTask& task = tasks[index];
    gateway::GenerationContext context{task.model, task.tmpl->name, task.record->cut_fqn};
    auto started = std::chrono::steady_clock::now();
    try {
      outcomes[index].raw_response = provider->generate(context, prompts[index]);
    } catch (const Error& e) {
      outcomes[index].status = "provider_error";
      outcomes[index].error_detail = std::string(e.code()) + ": " + e.what();
      ready[index] = false;
      return;
    }
    if (timed) {
      outcomes[index].latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - started)
                                       .count();
    }
  };

  const int cap = timed ? std::max(1, options.concurrency) : 1;
  if (cap > 1) {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t index = next.fetch_add(1);
        if (index >= tasks.size()) return;
        fetch(index);
      }
    };
    std::vector<std::thread> workers;
    for (int i = 0; i < cap; ++i) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) fetch(i);
  }

  for (std::size_t index = 0; index < tasks.size(); ++index) {
    if (!ready[index]) continue;
    const GenerationTask& task = tasks[index];
    auto& outcome = outcomes[index];

    std::string source;
    try {
      source = gateway::extract_test_source(outcome.raw_response);
    } catch (const gateway::ExtractionFailed& e) {
      outcome.status = "extraction_failed";
      outcome.error_detail = e.what();
      continue;
    }
    try {
      auto placed = gateway::place_test_class(task.working_copy, source);
      outcome.placed_path =
          std::filesystem::relative(placed, task.working_copy).generic_string();
      outcome.extracted_source = source;
      outcome.status = "ok";
    } catch (const Error& e) {
      outcome.status = "extraction_failed";
      outcome.error_detail = std::string(e.code()) + ": " + e.what();
    }
  }

  write_outcomes_jsonl(outcomes, options.workdir / "outcomes.jsonl");
}

namespace {

void run_measurement_phases(metrics::PerClassMetrics& row,
                            const std::filesystem::path& working_copy,
                            const runner::RunnerOptions& ropts, const runner::RunKey& key) {
  auto coverage = runner::run_phase(working_copy, runner::Phase::coverage, ropts, key);
  if (coverage.exit_ok && !coverage.artifacts.empty()) {
    try {
      auto summary = metrics::parse_coverage_report(coverage.artifacts.front(), row.cut_fqn);
      row.branch_coverage = summary.branch;
      row.line_coverage = summary.line;
      row.method_coverage = summary.method;
    } catch (const Error&) {
      // report missing this class: coverage stays undefined
    }
  }
  auto mutation = runner::run_phase(working_copy, runner::Phase::mutation, ropts, key);
  if (mutation.exit_ok && !mutation.artifacts.empty()) {
    try {
      row.mutation_score = metrics::parse_mutation_report(mutation.artifacts.front(), row.cut_fqn);
    } catch (const Error&) {
      // mutation stays undefined
    }
  }
}

}  // namespace

void stage_evaluate(const PipelineOptions& options) {
  auto outcomes = read_outcomes_jsonl(options.workdir / "outcomes.jsonl");
  auto records = miner::read_dataset_jsonl(dataset_path(options));

  runner::RunnerOptions ropts;
  ropts.mode = runner::mode_from_string(options.mode);
  ropts.replay_root = options.replay_dir;
  ropts.compile_timeout = options.compile_timeout;
  ropts.mutation_timeout = options.mutation_timeout;

  std::map<std::string, const miner::ClassUnderTestRecord*> record_by_fqn;
  std::map<std::string, std::filesystem::path> copies;
  for (const auto& record : records) {
    record_by_fqn[record.cut_fqn] = &record;
    std::string key = repo_key(record.repo.url_or_path, record.repo.branch);
    if (!copies.count(key)) {
      copies[key] = working_copy_for(record.repo.url_or_path, record.repo.branch, options);
    }
  }
  auto copy_of = [&](const miner::ClassUnderTestRecord& record) {
    return copies.at(repo_key(record.repo.url_or_path, record.repo.branch));
  };

  metrics::EvaluationLedger ledger;
  std::vector<runner::CompilationError> all_errors;

  for (const auto& outcome : outcomes) {
    metrics::PerClassMetrics row;
    row.model = outcome.model;
    row.prompt_name = outcome.prompt_name;
    row.project = outcome.project;
    row.cut_fqn = outcome.cut_fqn;
    row.smells = metrics::zeroed_smells();

    if (outcome.status != "ok" || !outcome.extracted_source.has_value()) {
      ledger.rows.push_back(std::move(row));
      continue;
    }

    try {
      row.smells = metrics::detect_smells(java::parse_unit(*outcome.extracted_source));
      row.smells_measured = true;
    } catch (const java::UnparseableSource&) {
      row.smells_measured = false;
    }

    auto record_it = record_by_fqn.find(outcome.cut_fqn);
    if (record_it == record_by_fqn.end()) {
      ledger.rows.push_back(std::move(row));
      continue;
    }
    const auto& record = *record_it->second;
    auto working_copy = copy_of(record);

    if (ropts.mode == runner::Mode::live && outcome.placed_path.has_value()) {
      detail::write_file(working_copy / *outcome.placed_path, *outcome.extracted_source);
    }

    runner::RunKey key{outcome.model, outcome.prompt_name, outcome.cut_fqn};
    auto compile = runner::run_phase(working_copy, runner::Phase::compile, ropts, key);
    row.build = compile.exit_ok;
    if (!compile.exit_ok) {
      auto diagnostics = runner::parse_diagnostics(compile.stderr_text);
      all_errors.insert(all_errors.end(), diagnostics.begin(), diagnostics.end());
    } else {
      run_measurement_phases(row, working_copy, ropts, key);
    }
    ledger.rows.push_back(std::move(row));
  }

  if (options.include_human) {
    for (const auto& record : records) {
      metrics::PerClassMetrics row;
      row.model = "human";
      row.prompt_name = "-";
      row.project = project_id(record.repo.url_or_path);
      row.cut_fqn = record.cut_fqn;
      row.build = true;  // the mined human test compiled within its project
      row.smells = metrics::zeroed_smells();

      auto working_copy = copy_of(record);
      try {
        row.smells = metrics::detect_smells(
            java::parse_unit(detail::read_file(working_copy / record.test_path)));
        row.smells_measured = true;
      } catch (const Error&) {
        row.smells_measured = false;
      }

      runner::RunKey key{"human", "-", record.cut_fqn};
      try {
        run_measurement_phases(row, working_copy, ropts, key);
      } catch (const runner::MissingReplayFixture&) {
        // no staged measurements for the human baseline: coverage stays
        // undefined but the row is kept
      } catch (const runner::ToolNotFound&) {
        if (ropts.mode == runner::Mode::live) throw;
      }
      ledger.rows.push_back(std::move(row));
    }
  }

  write_ledger_jsonl(ledger, options.workdir / "ledger.jsonl");

  std::string errors_buffer;
  for (const auto& err : all_errors) {
    json line = {
        {"file", err.file},
        {"line", err.line},
        {"message", err.message},
        {"category", runner::to_string(err.category)},
    };
    errors_buffer += line.dump();
    errors_buffer += '\n';
  }
  detail::write_file(options.workdir / "errors.jsonl", errors_buffer);
}

void stage_report(const PipelineOptions& options) {
  auto ledger = read_ledger_jsonl(options.workdir / "ledger.jsonl");

  metrics::AggregationPolicy policy = metrics::AggregationPolicy::compiled_only;
  if (!options.policy_override.empty()) {
    policy = metrics::policy_from_string(options.policy_override);
  } else if (!options.config_path.empty() && std::filesystem::exists(options.config_path)) {
    policy = prompt::load_config(detail::read_file(options.config_path)).aggregation_policy;
  }

  std::vector<ReportRow> rows;
  rows.reserve(ledger.rows.size());
  for (const auto& row : ledger.rows) rows.push_back(row_from_metrics(row));
  emit_csv(rows, options.workdir / "report.csv");

  auto aggregated = metrics::aggregate(ledger, policy);
  emit_aggregate_csv(aggregated, options.workdir / "aggregate.csv");

  if (!options.baseline_ledger.empty()) {
    auto baseline = metrics::aggregate(read_ledger_jsonl(options.baseline_ledger), policy);
    emit_deltas_csv(metrics::delta_table(baseline, aggregated),
                    options.workdir / "deltas.csv");
  }

  std::error_code ec;
  auto errors_file = options.workdir / "errors.jsonl";
  if (std::filesystem::exists(errors_file, ec) &&
      std::filesystem::file_size(errors_file, ec) > 0) {
    std::vector<runner::CompilationError> errors;
    for (auto& line : read_jsonl(errors_file, "errors.jsonl").lines) {
      runner::CompilationError err;
      err.file = line.value("file", "");
      err.line = line.value("line", 0);
      err.message = line.value("message", "");
      err.category = runner::classify_error(err.message);
      errors.push_back(std::move(err));
    }
    if (!errors.empty()) {
      emit_errors_profile_json(runner::error_profile(errors),
                               options.workdir / "errors_profile.json");
    }
  }

  RunManifest manifest;
  if (!options.config_path.empty() && std::filesystem::exists(options.config_path)) {
    manifest.config_digest = detail::sha1_hex(detail::read_file(options.config_path));
  }
  if (std::filesystem::exists(dataset_path(options))) {
    manifest.dataset_digest = detail::sha1_hex(detail::read_file(dataset_path(options)));
  }
  manifest.tool_versions = buildcfg::tool_versions();
  manifest.mode = options.mode;
  manifest.created_at = iso8601_now();
  write_manifest(manifest, options.workdir / "manifest.json");
}

}  // namespace agone::report
