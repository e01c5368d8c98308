#include "agone/detail/strings.hpp"
#include "agone/java_analysis.hpp"
#include "agone/llm_gateway.hpp"

namespace agone::gateway {

namespace {

bool parses_to_type(const std::string& candidate) {
  if (candidate.empty()) return false;
  try {
    auto unit = java::parse_unit(candidate);
    return !unit.type_names.empty();
  } catch (const java::UnparseableSource&) {
    return false;
  }
}

// Fenced blocks whose tag is java-ish or absent, concatenated in order.
std::string fenced_blocks(const std::string& raw) {
  std::string collected;
  bool in_block = false;
  bool block_wanted = false;
  for (const auto& line : detail::split_lines(raw)) {
    std::string_view trimmed = detail::trim(line);
    if (trimmed.rfind("```", 0) == 0) {
      if (!in_block) {
        std::string tag = detail::to_lower(std::string(detail::trim(trimmed.substr(3))));
        block_wanted = tag.empty() || tag == "java";
        in_block = true;
      } else {
        in_block = false;
        if (block_wanted && !collected.empty() && collected.back() != '\n') collected += '\n';
      }
      continue;
    }
    if (in_block && block_wanted) {
      collected += line;
      collected += '\n';
    }
  }
  return collected;
}

bool looks_like_code_start(std::string_view trimmed) {
  static const char* kStarts[] = {"package ", "import ", "public ", "final ",   "abstract ",
                                  "class ",   "interface ", "enum ", "record ", "@"};
  for (const char* start : kStarts) {
    if (trimmed.rfind(start, 0) == 0) return true;
  }
  return false;
}

std::string region_from_first_code_line(const std::string& raw) {
  auto lines = detail::split_lines(raw);
  int attempts = 0;
  for (std::size_t i = 0; i < lines.size() && attempts < 5; ++i) {
    if (!looks_like_code_start(detail::trim(lines[i]))) continue;
    ++attempts;
    std::string region;
    for (std::size_t j = i; j < lines.size(); ++j) {
      region += lines[j];
      region += '\n';
    }
    if (parses_to_type(region)) return region;
  }
  return {};
}

}  // namespace

std::string extract_test_source(const std::string& raw) {
  if (raw.empty()) {
    throw ExtractionFailed("empty response");
  }
  std::string fenced = fenced_blocks(raw);
  if (!fenced.empty() && parses_to_type(fenced)) {
    return fenced;
  }
  // a reply that opens with code is taken verbatim; anything else goes
  // through region recovery
  std::string first_line;
  for (const auto& line : detail::split_lines(raw)) {
    std::string trimmed(detail::trim(line));
    if (!trimmed.empty()) {
      first_line = std::move(trimmed);
      break;
    }
  }
  if (!first_line.empty() && looks_like_code_start(first_line) && parses_to_type(raw)) {
    return raw;
  }
  std::string region = region_from_first_code_line(raw);
  if (!region.empty()) {
    return region;
  }
  throw ExtractionFailed("no parseable top-level type in the response");
}

}  // namespace agone::gateway
