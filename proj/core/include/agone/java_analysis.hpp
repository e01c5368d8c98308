#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agone/errors.hpp"

// Parsing facade over Java source files. Provides the structural queries the
// rest of the harness needs (imports, invocations, constructions, annotations,
// assertions, literals, control flow) plus LOC and cyclomatic complexity.
//
// This is a tolerant concrete-syntax parser, not a semantic analyzer: type
// hints are best effort (declared variable types and constructor sites only),
// and malformed input degrades to partial results instead of failing, since
// model-generated sources are frequently malformed.
namespace agone::java {

AGONE_DEFINE_ERROR(UnparseableSource);

struct AssertionCall {
  std::string method_name;
  int arg_count = 0;
  bool has_message = false;
  std::vector<std::string> args_textual;
  std::string enclosing_method;
  int numeric_literal_args = 0;  // numeric literal tokens inside the argument list
  int tostring_in_args = 0;      // toString() invocations inside the argument list

  bool operator==(const AssertionCall&) const = default;
};

struct InvocationSite {
  std::string receiver_text;  // source text of the receiver chain, "" for bare calls
  std::string receiver_hint;  // best-effort type of the receiver, "" when unknown
  std::string method_name;
  std::vector<std::string> args;

  bool operator==(const InvocationSite&) const = default;
};

struct Annotation {
  std::string name;       // simple name, no '@'
  std::string args_text;  // raw text between parentheses, "" when absent
};

struct FieldDecl {
  std::string name;
  std::string type;
  bool initialized_at_declaration = false;
  std::vector<Annotation> annotations;
};

struct MethodDecl {
  std::string name;
  std::vector<Annotation> annotations;
  std::vector<std::string> param_types;
  std::vector<std::string> param_names;
  bool is_constructor = false;
  bool is_initializer = false;
  bool is_public = false;
  bool is_private = false;
  bool is_static = false;
  bool has_body = false;
  bool body_empty = false;

  // Source offsets of the whole member and of its body, for text surgery
  // (method elision in prompt fallbacks).
  std::size_t decl_begin = 0;
  std::size_t body_begin = 0;
  std::size_t body_end = 0;

  int decision_points = 0;          // if/loops/case/catch/ternary/&&/||
  int control_flow_statements = 0;  // if/for/while/do/switch occurrences
  bool has_throw = false;
  bool has_try = false;

  std::vector<InvocationSite> invocations;
  std::vector<AssertionCall> assertions;
  std::map<std::string, int> constructed_types;
  std::vector<std::string> numeric_literal_args;  // in any call's arguments
  std::set<std::string> identifiers_used;
  std::set<std::string> identifiers_assigned;
  std::map<std::string, int> mock_targets;  // types passed to mock/spy or stubbed vars

  int print_calls = 0;
  int sleep_calls = 0;
  int file_api_uses = 0;  // stream/path/db APIs; plain File objects are separate
  int file_objects = 0;   // `new File(...)` constructions
  bool has_existence_check = false;

  bool has_annotation(std::string_view n) const;
};

struct TypeDecl {
  std::string name;
  std::string kind;  // class | interface | enum | record | @interface
  std::vector<Annotation> annotations;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;  // includes constructors and initializer blocks
  std::vector<TypeDecl> nested;
};

struct JavaSourceUnit {
  std::filesystem::path path;
  std::string package_name;             // "" for the default package
  std::vector<std::string> type_names;  // top-level types in declaration order
  std::string raw_text;

  std::vector<std::string> imports;  // dotted names as written; may end in ".*"
  std::vector<TypeDecl> types;
  bool degraded = false;  // parse recovered from malformed regions
  std::vector<std::pair<std::size_t, std::size_t>> comment_spans;  // offset, length
};

struct AstFacts {
  std::vector<std::string> imports;
  std::map<std::string, int> constructed_types;
  std::map<std::pair<std::string, std::string>, int> invoked_methods;  // (hint, name)
  std::map<std::string, int> annotations;
  std::vector<AssertionCall> assertion_calls;
  int control_flow_count = 0;
  std::map<std::string, int> numeric_literal_args;
  int print_calls = 0;
  int sleep_calls = 0;
  int file_api_uses = 0;
  int tostring_in_assert = 0;
  std::map<std::string, int> mocking_targets;
  bool degraded = false;

  bool operator==(const AstFacts&) const = default;
};

struct ComplexityReport {
  int loc = 0;  // non-blank lines, comments included
  int cyclomatic_total = 0;
  int method_count = 0;

  bool operator==(const ComplexityReport&) const = default;
};

// Parses `source_text` into a structural model. Parsing is error-tolerant:
// malformed regions are skipped and the unit is flagged degraded. Throws
// UnparseableSource when no top-level type can be recovered.
JavaSourceUnit parse_unit(std::string_view source_text, const std::filesystem::path& path = {});

// Rolls the per-method structure up into unit-level fact multisets.
// Mocking references (mock/spy/when/verify/given and friends) appear in
// invoked_methods under the receiver hint "mocking".
AstFacts extract_facts(const JavaSourceUnit& unit);

// Per-method complexity is 1 + decision points; the report sums over methods
// and constructors. LOC counts non-blank lines, comments included.
ComplexityReport measure_complexity(const JavaSourceUnit& unit);

// `unit`'s text with every comment replaced by a single space.
std::string strip_comments(const JavaSourceUnit& unit);

// Numeric literal tokens in a Java expression snippet (string contents do not
// count).
int count_numeric_literals(std::string_view expr);

}  // namespace agone::java
