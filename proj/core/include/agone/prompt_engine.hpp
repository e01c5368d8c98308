#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agone/errors.hpp"
#include "agone/metrics_engine.hpp"
#include "agone/token_counter.hpp"

// Experiment configuration (models, temperatures, named prompt templates),
// template instantiation, and token-budget enforcement with configurable
// fallbacks.
namespace agone::prompt {

AGONE_DEFINE_ERROR(SchemaViolation);
AGONE_DEFINE_ERROR(TemperatureOutOfRange);
AGONE_DEFINE_ERROR(UnboundVariable);
AGONE_DEFINE_ERROR(StillOverBudget);

class TokenLimitExceeded : public Error {
 public:
  TokenLimitExceeded(int required, int limit)
      : Error("TokenLimitExceeded",
              "prompt requires " + std::to_string(required) + " tokens but the limit is " +
                  std::to_string(limit)),
        required_(required),
        limit_(limit) {}

  int required() const noexcept { return required_; }
  int limit() const noexcept { return limit_; }

 private:
  int required_;
  int limit_;
};

struct PromptMessage {
  std::string role;  // system | user
  std::string content;

  bool operator==(const PromptMessage&) const = default;
};

struct PromptTemplate {
  std::string name;
  std::vector<PromptMessage> messages;
};

struct ModelSpec {
  std::string model;
  double temperature = 0.0;
};

struct ExemplarPair {
  std::filesystem::path class_under_test;
  std::filesystem::path test_class;
  std::string testing_framework;
  std::string java_version;
};

struct ExperimentConfig {
  std::vector<ModelSpec> llms;
  std::vector<PromptTemplate> prompts;
  std::map<std::string, int> token_limits;
  metrics::AggregationPolicy aggregation_policy = metrics::AggregationPolicy::compiled_only;
  std::optional<ExemplarPair> exemplar;

  // Configured limit, else the built-in per-model default table, else 8192.
  int token_limit_for(const std::string& model) const;
  const PromptTemplate* find_prompt(const std::string& name) const;
};

// Accepts the llms/prompts YAML schema plus the optional token_limits,
// aggregation_policy and exemplar keys. Unknown top-level keys are rejected
// with the offending path.
ExperimentConfig load_config(const std::string& yaml_text);

struct PromptVariables {
  std::string class_under_test;
  std::string testing_framework;
  std::string java_version;
  std::string class_under_test_path;
  std::string example_class_under_test;
  std::string example_test_class;
  std::string example_testing_framework;
  std::string example_java_version;
  std::map<std::string, std::string> custom;

  // Declared fields bind when non-empty; custom entries always bind.
  std::optional<std::string> lookup(const std::string& name) const;
};

// Bundled example pair used by few-shot templates when the configuration
// names no exemplar.
PromptVariables with_default_exemplar(PromptVariables vars);

struct InstantiatedPrompt {
  std::string model;
  double temperature = 0.0;
  std::vector<PromptMessage> messages;
  int token_count = 0;
  int token_limit = 0;

  // provenance, so fallbacks can re-instantiate with reduced variables
  PromptTemplate source_template;
  PromptVariables source_variables;

  bool within_budget() const { return token_count <= token_limit; }
};

enum class FallbackStrategy { fail, truncate_comments, drop_low_relevance_methods };
FallbackStrategy fallback_from_string(const std::string& name);

class PromptEngine {
 public:
  PromptEngine(ExperimentConfig config, std::shared_ptr<const TokenCounter> counter);

  const ExperimentConfig& config() const { return config_; }

  // Literal textual substitution of {{variable}} placeholders; throws
  // UnboundVariable for placeholders without a binding and
  // TokenLimitExceeded(required, limit) when the result is over budget.
  InstantiatedPrompt instantiate(const PromptTemplate& tmpl, const PromptVariables& vars,
                                 const std::string& model, double temperature) const;

  // As instantiate, but over-budget prompts are returned rather than thrown,
  // so a fallback can be applied.
  InstantiatedPrompt instantiate_unchecked(const PromptTemplate& tmpl,
                                           const PromptVariables& vars, const std::string& model,
                                           double temperature) const;

  // Reduces an over-budget prompt. The result always fits the model limit and
  // counts strictly fewer tokens than the input; StillOverBudget when the
  // strategy cannot get there. The fail strategy surfaces
  // TokenLimitExceeded(required, limit) unchanged.
  InstantiatedPrompt apply_fallback(const InstantiatedPrompt& prompt,
                                    FallbackStrategy strategy) const;

 private:
  ExperimentConfig config_;
  std::shared_ptr<const TokenCounter> counter_;
};

// Copies `base` and points class_under_test_path at the project-relative
// location of the class under test (last write wins).
PromptVariables build_enhanced_variables(PromptVariables base,
                                         const std::string& cut_relative_path);

}  // namespace agone::prompt
