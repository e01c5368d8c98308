#include "agone/java_analysis.hpp"
#include "java_lexer.hpp"

namespace agone::java {

namespace {

bool is_mocking_call(const std::string& name) {
  return name == "mock" || name == "spy" || name == "when" || name == "verify" ||
         name == "given" || name == "doReturn" || name == "doThrow" || name == "doNothing";
}

bool is_mocking_import(const std::string& import_name) {
  return import_name.rfind("org.mockito", 0) == 0 || import_name.rfind("org.easymock", 0) == 0 ||
         import_name.rfind("org.jmock", 0) == 0 || import_name.rfind("org.powermock", 0) == 0 ||
         import_name.rfind("io.mockk", 0) == 0;
}

void roll_up_type(const TypeDecl& type, AstFacts& facts) {
  for (const auto& a : type.annotations) facts.annotations[a.name]++;
  for (const auto& f : type.fields) {
    for (const auto& a : f.annotations) facts.annotations[a.name]++;
  }
  for (const auto& m : type.methods) {
    for (const auto& a : m.annotations) facts.annotations[a.name]++;
    for (const auto& [t, n] : m.constructed_types) facts.constructed_types[t] += n;
    for (const auto& inv : m.invocations) {
      if (is_mocking_call(inv.method_name)) {
        facts.invoked_methods[{"mocking", inv.method_name}]++;
      } else {
        facts.invoked_methods[{inv.receiver_hint, inv.method_name}]++;
      }
    }
    for (const auto& call : m.assertions) {
      facts.assertion_calls.push_back(call);
      facts.tostring_in_assert += call.tostring_in_args;
    }
    facts.control_flow_count += m.control_flow_statements;
    for (const auto& lit : m.numeric_literal_args) facts.numeric_literal_args[lit]++;
    facts.print_calls += m.print_calls;
    facts.sleep_calls += m.sleep_calls;
    facts.file_api_uses += m.file_api_uses + m.file_objects;
    for (const auto& [t, n] : m.mock_targets) facts.mocking_targets[t] += n;
  }
  for (const auto& nested : type.nested) roll_up_type(nested, facts);
}

}  // namespace

AstFacts extract_facts(const JavaSourceUnit& unit) {
  AstFacts facts;
  facts.imports = unit.imports;
  facts.degraded = unit.degraded;
  for (const auto& imp : unit.imports) {
    if (is_mocking_import(imp)) facts.invoked_methods[{"mocking", "<import>"}]++;
  }
  for (const auto& type : unit.types) roll_up_type(type, facts);
  return facts;
}

namespace {

void count_methods(const TypeDecl& type, int& methods, int& decisions) {
  for (const auto& m : type.methods) {
    if (m.is_initializer) continue;
    methods += 1;
    decisions += m.decision_points;
  }
  for (const auto& nested : type.nested) count_methods(nested, methods, decisions);
}

}  // namespace

ComplexityReport measure_complexity(const JavaSourceUnit& unit) {
  ComplexityReport report;
  std::size_t pos = 0;
  const std::string& text = unit.raw_text;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = (nl == std::string::npos) ? text.size() : nl;
    bool blank = true;
    for (std::size_t i = pos; i < end; ++i) {
      if (!std::isspace(static_cast<unsigned char>(text[i]))) {
        blank = false;
        break;
      }
    }
    if (!blank) report.loc++;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }

  int methods = 0, decisions = 0;
  for (const auto& type : unit.types) count_methods(type, methods, decisions);
  report.method_count = methods;
  report.cyclomatic_total = methods + decisions;
  return report;
}

std::string strip_comments(const JavaSourceUnit& unit) {
  std::string out = unit.raw_text;
  // back to front so earlier offsets stay valid
  for (auto it = unit.comment_spans.rbegin(); it != unit.comment_spans.rend(); ++it) {
    const auto [offset, length] = *it;
    if (offset >= out.size()) continue;
    out.replace(offset, std::min(length, out.size() - offset), " ");
  }
  return out;
}

int count_numeric_literals(std::string_view expr) {
  auto lexed = internal::lex(expr);
  int count = 0;
  for (const auto& tok : lexed.tokens) {
    if (tok.kind == internal::Tok::Number) count++;
  }
  return count;
}

}  // namespace agone::java
