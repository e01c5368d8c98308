#include <array>

#include "agone/detail/strings.hpp"
#include "agone/test_runner.hpp"

namespace agone::runner {

std::string to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::SymbolNotFound: return "SymbolNotFound";
    case ErrorCategory::MissingImport: return "MissingImport";
    case ErrorCategory::OverrideIssue: return "OverrideIssue";
    case ErrorCategory::VisibilityIssue: return "VisibilityIssue";
    case ErrorCategory::TypeMismatch: return "TypeMismatch";
    case ErrorCategory::InstantiationIssue: return "InstantiationIssue";
    case ErrorCategory::SyntaxError: return "SyntaxError";
    case ErrorCategory::FinalVariableIssue: return "FinalVariableIssue";
    case ErrorCategory::Other: return "Other";
  }
  return "Other";
}

std::string to_string(ErrorGroup group) {
  switch (group) {
    case ErrorGroup::symbol_reference: return "symbol_reference";
    case ErrorGroup::structure_consistency: return "structure_consistency";
    case ErrorGroup::syntax_rules: return "syntax_rules";
    case ErrorGroup::other: return "other";
  }
  return "other";
}

ErrorGroup group_of(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::SymbolNotFound:
    case ErrorCategory::MissingImport:
      return ErrorGroup::symbol_reference;
    case ErrorCategory::OverrideIssue:
    case ErrorCategory::VisibilityIssue:
    case ErrorCategory::TypeMismatch:
    case ErrorCategory::InstantiationIssue:
      return ErrorGroup::structure_consistency;
    case ErrorCategory::SyntaxError:
    case ErrorCategory::FinalVariableIssue:
      return ErrorGroup::syntax_rules;
    case ErrorCategory::Other:
      return ErrorGroup::other;
  }
  return ErrorGroup::other;
}

ErrorCategory classify_error(const std::string& message) {
  using detail::contains;
  // ordered first-match rules over reference-compiler diagnostic phrasing
  if (contains(message, "cannot find symbol")) return ErrorCategory::SymbolNotFound;
  if ((contains(message, "package") && contains(message, "does not exist")) ||
      contains(message, "cannot access")) {
    return ErrorCategory::MissingImport;
  }
  if (contains(message, "does not override") ||
      contains(message, "is not abstract and does not override") ||
      contains(message, "method does not override or implement")) {
    return ErrorCategory::OverrideIssue;
  }
  if (contains(message, "has private access") || contains(message, "has protected access")) {
    return ErrorCategory::VisibilityIssue;
  }
  if (contains(message, "incompatible types") || contains(message, "cannot be converted to")) {
    return ErrorCategory::TypeMismatch;
  }
  if (contains(message, "is abstract; cannot be instantiated") ||
      (contains(message, "constructor") && contains(message, "cannot be applied"))) {
    return ErrorCategory::InstantiationIssue;
  }
  if (contains(message, "cannot assign a value to final variable")) {
    return ErrorCategory::FinalVariableIssue;
  }
  if (contains(message, "expected") || contains(message, "illegal start of")) {
    return ErrorCategory::SyntaxError;
  }
  return ErrorCategory::Other;
}

std::vector<CompilationError> parse_diagnostics(const std::string& compiler_output) {
  std::vector<CompilationError> errors;
  for (const auto& line : detail::split_lines(compiler_output)) {
    auto marker = line.find(": error: ");
    CompilationError err;
    if (marker != std::string::npos) {
      std::string location = line.substr(0, marker);
      err.message = line.substr(marker + 9);
      auto colon = location.rfind(':');
      if (colon != std::string::npos) {
        err.file = location.substr(0, colon);
        try {
          err.line = std::stoi(location.substr(colon + 1));
        } catch (const std::exception&) {
          err.line = 0;
        }
      } else {
        err.file = location;
      }
    } else if (line.rfind("error: ", 0) == 0) {
      err.message = line.substr(7);
    } else if (line.rfind("[ERROR] ", 0) == 0 && detail::contains(line, ".java")) {
      err.message = line.substr(8);
    } else {
      continue;
    }
    err.category = classify_error(err.message);
    errors.push_back(std::move(err));
  }
  return errors;
}

ErrorProfile error_profile(const std::vector<CompilationError>& errors) {
  if (errors.empty()) {
    throw EmptyInput("error profile of an empty diagnostic set");
  }
  ErrorProfile profile;
  const ErrorCategory all[] = {
      ErrorCategory::SymbolNotFound,    ErrorCategory::MissingImport,
      ErrorCategory::OverrideIssue,     ErrorCategory::VisibilityIssue,
      ErrorCategory::TypeMismatch,      ErrorCategory::InstantiationIssue,
      ErrorCategory::SyntaxError,       ErrorCategory::FinalVariableIssue,
      ErrorCategory::Other,
  };
  for (ErrorCategory c : all) profile.counts[c] = 0;
  const ErrorGroup groups[] = {ErrorGroup::symbol_reference, ErrorGroup::structure_consistency,
                               ErrorGroup::syntax_rules, ErrorGroup::other};
  for (ErrorGroup g : groups) profile.group_counts[g] = 0;

  for (const auto& err : errors) {
    profile.counts[err.category]++;
    profile.group_counts[group_of(err.category)]++;
    profile.total++;
  }
  for (ErrorCategory c : all) {
    profile.category_percentages[c] =
        100.0 * static_cast<double>(profile.counts[c]) / profile.total;
  }
  return profile;
}

}  // namespace agone::runner
