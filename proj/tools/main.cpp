#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agone/errors.hpp"
#include "agone/reporting.hpp"

namespace {

void print_error_json(const std::string& code, const std::string& message) {
  nlohmann::json err = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value ? value : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agone - evaluation harness for LLM-generated Java unit tests"};
  app.require_subcommand(1);

  agone::report::PipelineOptions options;
  std::string config_path = env_or("AGONE_CONFIG", "");
  std::string workdir = "agone-work";
  std::string mode = "replay";

  app.add_option("--config", config_path, "experiment configuration YAML (env AGONE_CONFIG)");
  app.add_option("--workdir", workdir, "stage artifact directory");
  app.add_option("--mode", mode, "build execution mode: live or replay");

  // mine
  auto* mine = app.add_subcommand("mine", "build a class-to-test dataset from a repository");
  std::string repo, branch, out_dir;
  mine->add_option("--repo", repo, "repository locator (URL or local path)")->required();
  mine->add_option("--branch", branch, "branch name");
  mine->add_option("--out", out_dir, "output directory (defaults to --workdir)");
  bool require_build = false;
  mine->add_flag("--require-build", require_build,
                 "drop the repository when its baseline build fails");

  // generate
  auto* generate = app.add_subcommand("generate", "obtain test suites from the configured models");
  std::string provider = "replay";
  std::string replay_dir, base_url, api_key_ref = "AGONE_API_KEY", fallback = "fail";
  std::vector<std::string> custom_vars;
  int concurrency = 4;
  generate->add_option("--provider", provider, "http, mock, or replay");
  generate->add_option("--replay-dir", replay_dir,
                       "canned responses: {model}/{prompt}/{cut_fqn}.txt");
  generate->add_option("--base-url", base_url, "chat-completions endpoint base URL");
  generate->add_option("--api-key-ref", api_key_ref, "env var holding the API key");
  generate->add_option("--fallback", fallback,
                       "token-budget fallback: fail, truncate_comments, "
                       "drop_low_relevance_methods");
  generate->add_option("--var", custom_vars, "custom prompt variable name=value")
      ->take_all();
  generate->add_option("--concurrency", concurrency, "in-flight completion cap");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "compile, run, and measure the generated tests");
  std::string eval_replay_dir;
  long timeout_compile = 300, timeout_mutation = 1800;
  bool skip_human = false;
  evaluate->add_option("--replay-dir", eval_replay_dir,
                       "replay fixtures directory (manifest.json + artifacts)");
  evaluate->add_option("--timeout-compile", timeout_compile, "compile/test phase limit, seconds");
  evaluate->add_option("--timeout-mutation", timeout_mutation, "mutation phase limit, seconds");
  evaluate->add_flag("--skip-human", skip_human, "omit the human-baseline rows");

  // report
  auto* report = app.add_subcommand("report", "emit the per-class CSV and aggregate tables");
  std::string policy, baseline_ledger, ledger_path;
  report->add_option("--policy", policy, "compiled_only or zero_penalized");
  report->add_option("--baseline-ledger", baseline_ledger,
                     "earlier ledger.jsonl; enables the delta table");
  report->add_option("--ledger", ledger_path, "ledger to report on (defaults to the workdir's)");

  CLI11_PARSE(app, argc, argv);

  options.workdir = workdir;
  options.config_path = config_path;
  options.mode = mode;

  try {
    if (mine->parsed()) {
      if (!out_dir.empty()) options.workdir = out_dir;
      options.require_build = require_build;
      agone::report::stage_mine(repo, branch, options);
    } else if (generate->parsed()) {
      if (config_path.empty()) {
        throw agone::Error("MissingInput", "no configuration: pass --config or set AGONE_CONFIG");
      }
      options.provider = provider;
      options.replay_dir = replay_dir;
      options.base_url = base_url;
      options.api_key_ref = api_key_ref;
      options.fallback = fallback;
      options.concurrency = concurrency;
      for (const auto& assignment : custom_vars) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos) {
          throw agone::Error("BadArgument", "--var expects name=value, got: " + assignment);
        }
        options.custom_vars[assignment.substr(0, eq)] = assignment.substr(eq + 1);
      }
      agone::report::stage_generate(options);
    } else if (evaluate->parsed()) {
      options.replay_dir = eval_replay_dir;
      options.compile_timeout = std::chrono::seconds(timeout_compile);
      options.mutation_timeout = std::chrono::seconds(timeout_mutation);
      options.include_human = !skip_human;
      agone::report::stage_evaluate(options);
    } else if (report->parsed()) {
      options.policy_override = policy;
      options.baseline_ledger = baseline_ledger;
      if (!ledger_path.empty()) {
        // reporting on an explicit ledger: stage it into the workdir layout
        std::filesystem::create_directories(options.workdir);
        std::filesystem::copy_file(ledger_path, options.workdir / "ledger.jsonl",
                                   std::filesystem::copy_options::overwrite_existing);
      }
      agone::report::stage_report(options);
    }
  } catch (const agone::Error& e) {
    print_error_json(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error_json("Internal", e.what());
    return 1;
  }
  return 0;
}
