#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "agone/detail/fs.hpp"
#include "agone/prompt_engine.hpp"
#include "agone/token_counter.hpp"

using namespace agone;

namespace {

const std::filesystem::path kFixtures = AGONE_TEST_FIXTURES_DIR;
const std::filesystem::path kDataDir = AGONE_CORE_DATA_DIR;

prompt::PromptEngine engine_with(prompt::ExperimentConfig config) {
  return prompt::PromptEngine(std::move(config), std::make_shared<prompt::ConservativeCounter>());
}

prompt::ExperimentConfig minimal_config() {
  return prompt::load_config(
      "llms:\n"
      "- model: test-model\n"
      "  temperature: 0\n"
      "prompts:\n"
      "- name: zero-shot\n"
      "  value:\n"
      "  - role: user\n"
      "    content: \"The project uses {{testing_framework}} and Java {{java_version}}\"\n");
}

}  // namespace

TEST_CASE("the published example configuration loads verbatim") {
  auto text = detail::read_file(kFixtures / "configs/experiment.yaml");
  auto config = prompt::load_config(text);

  REQUIRE(config.llms.size() == 3);
  CHECK(config.llms[0].model == "gpt-4o-mini");
  CHECK(config.llms[1].model == "gemini-1.5-pro");
  CHECK(config.llms[2].model == "llama3.1:70b");
  for (const auto& llm : config.llms) CHECK(llm.temperature == 0.0);

  REQUIRE(config.prompts.size() == 2);
  CHECK(config.prompts[0].name == "zero-shot");
  CHECK(config.prompts[1].name == "few-shot");
  REQUIRE(config.prompts[0].messages.size() == 2);
  CHECK(config.prompts[0].messages[0].role == "system");
  CHECK(config.prompts[0].messages[1].role == "user");
  CHECK(config.prompts[0].messages[0].content.find("Reply with code only") != std::string::npos);
}

TEST_CASE("temperature outside [0,2] is rejected") {
  CHECK_THROWS_AS(prompt::load_config("llms:\n- model: m\n  temperature: 2.5\nprompts: []\n"),
                  prompt::TemperatureOutOfRange);
  CHECK_THROWS_AS(prompt::load_config("llms:\n- model: m\n  temperature: -0.1\nprompts: []\n"),
                  prompt::TemperatureOutOfRange);
  CHECK_NOTHROW(prompt::load_config("llms:\n- model: m\n  temperature: 2\nprompts: []\n"));
}

TEST_CASE("assistant role and unknown keys are schema violations") {
  CHECK_THROWS_AS(prompt::load_config("llms: []\nprompts:\n- name: p\n  value:\n"
                                      "  - role: assistant\n    content: hi\n"),
                  prompt::SchemaViolation);
  CHECK_THROWS_AS(prompt::load_config("llms: []\nprompts: []\nsurprise: 1\n"),
                  prompt::SchemaViolation);
  try {
    prompt::load_config("llms: []\nprompts: []\nsurprise: 1\n");
  } catch (const prompt::SchemaViolation& e) {
    CHECK(std::string(e.what()).find("surprise") != std::string::npos);
  }
}

TEST_CASE("duplicate prompt names are rejected") {
  CHECK_THROWS_AS(
      prompt::load_config("llms: []\nprompts:\n- name: a\n  value: []\n- name: a\n  value: []\n"),
      prompt::SchemaViolation);
}

TEST_CASE("extended keys: token limits, policy, exemplar") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 1\n"
      "prompts: []\n"
      "token_limits:\n  m: 100\n"
      "aggregation_policy: zero_penalized\n"
      "exemplar:\n  class_under_test: a/Calc.java\n  test_class: a/CalcTest.java\n");
  CHECK(config.token_limit_for("m") == 100);
  CHECK(config.aggregation_policy == metrics::AggregationPolicy::zero_penalized);
  REQUIRE(config.exemplar.has_value());
  CHECK(config.exemplar->class_under_test == "a/Calc.java");
  CHECK(config.token_limit_for("gemini-1.5-pro") == 2000000);  // default table
  CHECK(config.token_limit_for("never-heard-of-it") == 8192);
}

TEST_CASE("instantiation replaces declared variables literally") {
  auto config = minimal_config();
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = "class X {}";
  vars.testing_framework = "JUnit 4";
  vars.java_version = "11";

  auto out = engine.instantiate(config.prompts[0], vars, "test-model", 0.0);
  REQUIRE(out.messages.size() == 1);
  CHECK(out.messages[0].content == "The project uses JUnit 4 and Java 11");
  CHECK(out.token_count > 0);
}

TEST_CASE("unbound placeholders name the offender") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{undeclared}}\"\n");
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = "class X {}";
  try {
    engine.instantiate(config.prompts[0], vars, "m", 0.0);
    FAIL("expected UnboundVariable");
  } catch (const prompt::UnboundVariable& e) {
    CHECK(std::string(e.what()) == "undeclared");
  }
}

TEST_CASE("custom variables bind placeholders the schema does not declare") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{house_style}}\"\n");
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = "class X {}";
  vars.custom["house_style"] = "Arrange-Act-Assert";
  auto out = engine.instantiate(config.prompts[0], vars, "m", 0.0);
  CHECK(out.messages[0].content == "Arrange-Act-Assert");
}

TEST_CASE("substitution output never retains placeholder braces") {
  auto text = detail::read_file(kFixtures / "configs/experiment.yaml");
  auto config = prompt::load_config(text);
  auto engine = engine_with(config);
  prompt::PromptVariables vars = prompt::with_default_exemplar({});
  vars.class_under_test = "public class Key { public String encode(String s) { return s; } }";
  vars.testing_framework = "JUnit 5";
  vars.java_version = "17";
  vars.custom["example_java_class"] = vars.example_class_under_test;

  for (const auto& tmpl : config.prompts) {
    auto out = engine.instantiate(tmpl, vars, "gpt-4o-mini", 0.0);
    for (const auto& message : out.messages) {
      CHECK(message.content.find("{{") == std::string::npos);
    }
  }
}

TEST_CASE("instantiation is deterministic") {
  auto config = minimal_config();
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = "class X {}";
  vars.testing_framework = "JUnit 4";
  vars.java_version = "8";
  auto a = engine.instantiate(config.prompts[0], vars, "test-model", 0.0);
  auto b = engine.instantiate(config.prompts[0], vars, "test-model", 0.0);
  CHECK(a.messages == b.messages);
  CHECK(a.token_count == b.token_count);
}

TEST_CASE("token budget breach reports required and limit") {
  // conservative counter: ceil(bytes/3); 450 bytes of class text -> 150 tokens
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{class_under_test}}\"\n"
      "token_limits:\n  m: 100\n");
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = std::string(449, 'x');  // +1 trailing newline in the count
  try {
    engine.instantiate(config.prompts[0], vars, "m", 0.0);
    FAIL("expected TokenLimitExceeded");
  } catch (const prompt::TokenLimitExceeded& e) {
    CHECK(e.required() == 150);
    CHECK(e.limit() == 100);
  }
}

TEST_CASE("truncate_comments fallback fits a comment-heavy class") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{class_under_test}}\"\n"
      "token_limits:\n  m: 60\n");
  auto engine = engine_with(config);

  // comments are the overage: body is small, comment block is huge
  std::string heavy = "public class C {\n/* " + std::string(400, 'c') +
                      " */\n  int f() { return 1; }\n}\n";
  prompt::PromptVariables vars;
  vars.class_under_test = heavy;
  auto over = engine.instantiate_unchecked(config.prompts[0], vars, "m", 0.0);
  REQUIRE_FALSE(over.within_budget());

  auto reduced = engine.apply_fallback(over, prompt::FallbackStrategy::truncate_comments);
  CHECK(reduced.within_budget());
  CHECK(reduced.token_count < over.token_count);
}

TEST_CASE("drop_low_relevance_methods elides unreferenced private helpers") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{class_under_test}}\"\n"
      "token_limits:\n  m: 60\n");
  auto engine = engine_with(config);

  std::string cls =
      "public class C {\n"
      "  public int used() { return helperKept(); }\n"
      "  private int helperKept() { return 1; }\n"
      "  private void helperHuge() { int x = 0; x += " + std::string(320, '1') + "; }\n"
      "}\n";
  prompt::PromptVariables vars;
  vars.class_under_test = cls;
  auto over = engine.instantiate_unchecked(config.prompts[0], vars, "m", 0.0);
  REQUIRE_FALSE(over.within_budget());

  auto reduced =
      engine.apply_fallback(over, prompt::FallbackStrategy::drop_low_relevance_methods);
  CHECK(reduced.within_budget());
  CHECK(reduced.token_count < over.token_count);
  REQUIRE(reduced.messages.size() == 1);
  CHECK(reduced.messages[0].content.find("helperHuge") == std::string::npos);
  CHECK(reduced.messages[0].content.find("helperKept") != std::string::npos);
}

TEST_CASE("no comments and no elidable methods leaves the budget standing") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{class_under_test}}\"\n"
      "token_limits:\n  m: 10\n");
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test =
      "public class C { public int f() { return " + std::string(100, '1') + "; } }";
  auto over = engine.instantiate_unchecked(config.prompts[0], vars, "m", 0.0);
  REQUIRE_FALSE(over.within_budget());
  CHECK_THROWS_AS(engine.apply_fallback(over, prompt::FallbackStrategy::truncate_comments),
                  prompt::StillOverBudget);
  CHECK_THROWS_AS(
      engine.apply_fallback(over, prompt::FallbackStrategy::drop_low_relevance_methods),
      prompt::StillOverBudget);
}

TEST_CASE("fail strategy surfaces the original budget error") {
  auto config = prompt::load_config(
      "llms:\n- model: m\n  temperature: 0\n"
      "prompts:\n- name: p\n  value:\n  - role: user\n    content: \"{{class_under_test}}\"\n"
      "token_limits:\n  m: 10\n");
  auto engine = engine_with(config);
  prompt::PromptVariables vars;
  vars.class_under_test = "public class C { /* pad pad pad pad pad pad pad */ }";
  auto over = engine.instantiate_unchecked(config.prompts[0], vars, "m", 0.0);
  try {
    engine.apply_fallback(over, prompt::FallbackStrategy::fail);
    FAIL("expected TokenLimitExceeded");
  } catch (const prompt::TokenLimitExceeded& e) {
    CHECK(e.required() == over.token_count);
    CHECK(e.limit() == over.token_limit);
  }
}

TEST_CASE("enhanced variables carry the class-under-test path") {
  prompt::PromptVariables base;
  base.class_under_test = "class K {}";
  auto enhanced = prompt::build_enhanced_variables(base, "src/main/java/com/example/Key.java");
  CHECK(enhanced.class_under_test_path == "src/main/java/com/example/Key.java");

  // last write wins
  auto overwritten = prompt::build_enhanced_variables(enhanced, "modules/core/src/com/x/Key.java");
  CHECK(overwritten.class_under_test_path == "modules/core/src/com/x/Key.java");
}

TEST_CASE("bundled vocabulary counts fewer tokens than the conservative floor") {
  auto counter = prompt::BpeCounter::load(kDataDir / "bpe.vocab");
  CHECK(counter.merge_count() > 100);
  CHECK(counter.covers_model("gpt-4o-mini"));

  std::string java_text =
      "public class KeyTest { @Test public void encodes() { assertEquals(1, key.size()); } }";
  int bpe = counter.count(java_text, "gpt-4o-mini");
  CHECK(bpe > 0);
  CHECK(bpe < static_cast<int>(java_text.size()));

  // counting is deterministic
  CHECK(counter.count(java_text, "gpt-4o-mini") == bpe);
}

TEST_CASE("vocabulary model mismatch falls back to ceil(bytes/3)") {
  // a vocab restricted to one model prefix
  auto dir = std::filesystem::temp_directory_path() / "agone_vocab_test";
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "narrow.vocab", "models: gpt-\nmerges:\ne r\nt h\n");
  auto counter = prompt::BpeCounter::load(dir / "narrow.vocab");
  CHECK(counter.covers_model("gpt-4o-mini"));
  CHECK_FALSE(counter.covers_model("claude-x"));
  std::string text = "abcdef";  // 6 bytes -> 2 tokens under the fallback
  CHECK(counter.count(text, "claude-x") == 2);
  std::filesystem::remove_all(dir);
}
