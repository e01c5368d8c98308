#include <algorithm>

#include "agone/java_analysis.hpp"
#include "agone/prompt_engine.hpp"

namespace agone::prompt {

namespace {

// Default few-shot exemplar: a small calculator class and its test class.
constexpr const char* kExampleClass = R"(package com.example.project;

public class Calculator {

    public int add(int a, int b) {
        return a + b;
    }

    public int subtract(int a, int b) {
        return a - b;
    }

    public int multiply(int a, int b) {
        return a * b;
    }

    public double divide(int a, int b) {
        if (b == 0) {
            throw new ArithmeticException("division by zero");
        }
        return (double) a / b;
    }
}
)";

constexpr const char* kExampleTestClass = R"(package com.example.project;

import static org.junit.jupiter.api.Assertions.assertEquals;
import static org.junit.jupiter.api.Assertions.assertThrows;

import org.junit.jupiter.api.Test;

class CalculatorTests {

    @Test
    void addsTwoNumbers() {
        assertEquals(2, new Calculator().add(1, 1));
    }

    @Test
    void subtractsTwoNumbers() {
        assertEquals(3, new Calculator().subtract(5, 2));
    }

    @Test
    void multipliesTwoNumbers() {
        assertEquals(12, new Calculator().multiply(3, 4));
    }

    @Test
    void refusesDivisionByZero() {
        assertThrows(ArithmeticException.class, () -> new Calculator().divide(1, 0));
    }
}
)";

}  // namespace

std::optional<std::string> PromptVariables::lookup(const std::string& name) const {
  auto bind = [](const std::string& value) -> std::optional<std::string> {
    if (value.empty()) return std::nullopt;
    return value;
  };
  if (name == "class_under_test") return bind(class_under_test);
  if (name == "testing_framework") return bind(testing_framework);
  if (name == "java_version") return bind(java_version);
  if (name == "class_under_test_path") return bind(class_under_test_path);
  if (name == "example_class_under_test") return bind(example_class_under_test);
  if (name == "example_test_class") return bind(example_test_class);
  if (name == "example_testing_framework") return bind(example_testing_framework);
  if (name == "example_java_version") return bind(example_java_version);
  auto it = custom.find(name);
  if (it != custom.end()) return it->second;
  return std::nullopt;
}

PromptVariables with_default_exemplar(PromptVariables vars) {
  if (vars.example_class_under_test.empty()) vars.example_class_under_test = kExampleClass;
  if (vars.example_test_class.empty()) vars.example_test_class = kExampleTestClass;
  if (vars.example_testing_framework.empty()) vars.example_testing_framework = "JUnit 5";
  if (vars.example_java_version.empty()) vars.example_java_version = "17";
  return vars;
}

FallbackStrategy fallback_from_string(const std::string& name) {
  if (name == "fail") return FallbackStrategy::fail;
  if (name == "truncate_comments") return FallbackStrategy::truncate_comments;
  if (name == "drop_low_relevance_methods") return FallbackStrategy::drop_low_relevance_methods;
  throw Error("UnknownFallback", "unknown fallback strategy: " + name);
}

PromptVariables build_enhanced_variables(PromptVariables base,
                                         const std::string& cut_relative_path) {
  base.class_under_test_path = cut_relative_path;
  return base;
}

PromptEngine::PromptEngine(ExperimentConfig config, std::shared_ptr<const TokenCounter> counter)
    : config_(std::move(config)), counter_(std::move(counter)) {}

namespace {

std::string substitute(const std::string& content, const PromptVariables& vars) {
  std::string out;
  out.reserve(content.size());
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t open = content.find("{{", pos);
    if (open == std::string::npos) {
      out.append(content, pos, std::string::npos);
      break;
    }
    std::size_t close = content.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(content, pos, std::string::npos);
      break;
    }
    out.append(content, pos, open - pos);
    std::string name = content.substr(open + 2, close - open - 2);
    // tolerate padding inside the braces
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    while (!name.empty() && name.back() == ' ') name.pop_back();
    auto value = vars.lookup(name);
    if (!value.has_value()) {
      throw UnboundVariable(name);
    }
    out.append(*value);
    pos = close + 2;
  }
  return out;
}

}  // namespace

InstantiatedPrompt PromptEngine::instantiate_unchecked(const PromptTemplate& tmpl,
                                                       const PromptVariables& vars,
                                                       const std::string& model,
                                                       double temperature) const {
  InstantiatedPrompt prompt;
  prompt.model = model;
  prompt.temperature = temperature;
  prompt.source_template = tmpl;
  prompt.source_variables = vars;
  prompt.token_limit = config_.token_limit_for(model);

  std::string all_text;
  for (const auto& message : tmpl.messages) {
    PromptMessage instantiated{message.role, substitute(message.content, vars)};
    all_text += instantiated.content;
    all_text += '\n';
    prompt.messages.push_back(std::move(instantiated));
  }
  prompt.token_count = counter_->count(all_text, model);
  return prompt;
}

InstantiatedPrompt PromptEngine::instantiate(const PromptTemplate& tmpl,
                                             const PromptVariables& vars,
                                             const std::string& model,
                                             double temperature) const {
  auto prompt = instantiate_unchecked(tmpl, vars, model, temperature);
  if (!prompt.within_budget()) {
    throw TokenLimitExceeded(prompt.token_count, prompt.token_limit);
  }
  return prompt;
}

namespace {

struct ElidableMethod {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Private methods that no public method invokes, longest first.
std::vector<ElidableMethod> elidable_methods(const java::JavaSourceUnit& unit) {
  std::vector<ElidableMethod> out;
  for (const auto& type : unit.types) {
    std::set<std::string> called_by_public;
    for (const auto& m : type.methods) {
      if (!m.is_public) continue;
      for (const auto& inv : m.invocations) called_by_public.insert(inv.method_name);
    }
    for (const auto& m : type.methods) {
      if (!m.is_private || m.is_constructor || m.is_initializer || !m.has_body) continue;
      if (called_by_public.count(m.name)) continue;
      out.push_back({m.decl_begin, m.body_end});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ElidableMethod& a, const ElidableMethod& b) { return a.size() > b.size(); });
  return out;
}

std::string remove_spans(const std::string& text, std::vector<ElidableMethod> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const ElidableMethod& a, const ElidableMethod& b) { return a.begin > b.begin; });
  std::string out = text;
  for (const auto& span : spans) {
    if (span.begin >= out.size() || span.end > out.size()) continue;
    out.erase(span.begin, span.end - span.begin);
  }
  return out;
}

}  // namespace

InstantiatedPrompt PromptEngine::apply_fallback(const InstantiatedPrompt& prompt,
                                                FallbackStrategy strategy) const {
  if (strategy == FallbackStrategy::fail) {
    throw TokenLimitExceeded(prompt.token_count, prompt.token_limit);
  }

  java::JavaSourceUnit unit;
  try {
    unit = java::parse_unit(prompt.source_variables.class_under_test);
  } catch (const java::UnparseableSource&) {
    throw StillOverBudget("class under test does not parse; nothing to reduce");
  }

  auto retry_with_class_text = [&](std::string reduced_class) -> std::optional<InstantiatedPrompt> {
    PromptVariables vars = prompt.source_variables;
    vars.class_under_test = std::move(reduced_class);
    auto reduced =
        instantiate_unchecked(prompt.source_template, vars, prompt.model, prompt.temperature);
    if (reduced.token_count >= prompt.token_count) return std::nullopt;  // no progress
    if (!reduced.within_budget()) return std::nullopt;
    return reduced;
  };

  if (strategy == FallbackStrategy::truncate_comments) {
    if (auto reduced = retry_with_class_text(java::strip_comments(unit))) {
      return *reduced;
    }
    throw StillOverBudget("removing comments does not bring the prompt within " +
                          std::to_string(prompt.token_limit) + " tokens");
  }

  // drop_low_relevance_methods: elide unreferenced private methods, longest
  // first, until the prompt fits
  auto candidates = elidable_methods(unit);
  for (std::size_t take = 1; take <= candidates.size(); ++take) {
    std::vector<ElidableMethod> chosen(candidates.begin(),
                                       candidates.begin() + static_cast<std::ptrdiff_t>(take));
    auto reduced_text = remove_spans(unit.raw_text, std::move(chosen));
    if (auto reduced = retry_with_class_text(reduced_text)) {
      return *reduced;
    }
  }
  throw StillOverBudget("no elidable private methods bring the prompt within " +
                        std::to_string(prompt.token_limit) + " tokens");
}

}  // namespace agone::prompt
