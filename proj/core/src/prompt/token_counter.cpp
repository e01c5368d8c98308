#include "agone/token_counter.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>

#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"

#ifndef AGONE_DEFAULT_DATA_DIR
#define AGONE_DEFAULT_DATA_DIR ""
#endif
#ifndef AGONE_BUILD_DATA_DIR
#define AGONE_BUILD_DATA_DIR ""
#endif

namespace agone::prompt {

int ConservativeCounter::count(std::string_view text, const std::string&) const {
  return static_cast<int>((text.size() + 2) / 3);
}

BpeCounter BpeCounter::load(const std::filesystem::path& vocab_file) {
  BpeCounter counter;
  std::string text = detail::read_file(vocab_file);
  bool in_merges = false;
  int rank = 0;
  for (const auto& raw : detail::split_lines(text)) {
    std::string line(detail::trim(raw));
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("models:", 0) == 0) {
      for (const auto& pattern : detail::split(line.substr(7), ',')) {
        std::string p(detail::trim(pattern));
        if (!p.empty()) counter.model_patterns_.push_back(p);
      }
      continue;
    }
    if (line == "merges:") {
      in_merges = true;
      continue;
    }
    if (!in_merges) continue;
    auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 >= line.size()) {
      throw VocabularyError(vocab_file.string() + ": malformed merge line: " + line);
    }
    counter.ranks_[{line.substr(0, space), line.substr(space + 1)}] = rank++;
  }
  if (counter.ranks_.empty()) {
    throw VocabularyError(vocab_file.string() + ": no merges");
  }
  return counter;
}

bool BpeCounter::covers_model(const std::string& model) const {
  for (const auto& pattern : model_patterns_) {
    if (pattern == "*") return true;
    if (model.rfind(pattern, 0) == 0) return true;
  }
  return false;
}

namespace {

int bpe_word_tokens(const std::map<std::pair<std::string, std::string>, int>& ranks,
                    std::string_view word) {
  std::vector<std::string> symbols;
  symbols.reserve(word.size());
  for (char c : word) symbols.emplace_back(1, c);
  while (symbols.size() > 1) {
    int best_rank = std::numeric_limits<int>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = ranks.find({symbols[i], symbols[i + 1]});
      if (it != ranks.end() && it->second < best_rank) {
        best_rank = it->second;
        best_at = i;
      }
    }
    if (best_rank == std::numeric_limits<int>::max()) break;
    symbols[best_at] += symbols[best_at + 1];
    symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_at) + 1);
  }
  return static_cast<int>(symbols.size());
}

}  // namespace

int BpeCounter::count(std::string_view text, const std::string& model) const {
  if (!covers_model(model)) {
    return fallback_.count(text, model);
  }
  int tokens = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      tokens += 1;  // one token per whitespace run
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens += bpe_word_tokens(ranks_, text.substr(start, i - start));
  }
  return tokens;
}

std::shared_ptr<const TokenCounter> default_token_counter() {
  std::vector<std::filesystem::path> candidates;
  if (const char* env = std::getenv("AGONE_BPE_VOCAB")) {
    candidates.emplace_back(env);
  }
  for (const char* dir : {AGONE_DEFAULT_DATA_DIR, AGONE_BUILD_DATA_DIR}) {
    std::string base = dir;
    if (!base.empty()) candidates.emplace_back(std::filesystem::path(base) / "bpe.vocab");
  }
  for (const auto& candidate : candidates) {
    std::error_code ec;
    if (!std::filesystem::exists(candidate, ec)) continue;
    try {
      return std::make_shared<BpeCounter>(BpeCounter::load(candidate));
    } catch (const VocabularyError&) {
      continue;
    }
  }
  return std::make_shared<ConservativeCounter>();
}

}  // namespace agone::prompt
