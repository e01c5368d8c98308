#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "agone/errors.hpp"

namespace agone::prompt {

AGONE_DEFINE_ERROR(VocabularyError);

// Pluggable prompt token counting.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual int count(std::string_view text, const std::string& model) const = 0;
};

// ceil(bytes/3): deliberately pessimistic so a fallback count never slips an
// oversized prompt past a model limit.
class ConservativeCounter : public TokenCounter {
 public:
  int count(std::string_view text, const std::string& model) const override;
};

// Byte-pair counter loaded from a merges file. Whitespace runs cost one token
// each; merges apply within whitespace-delimited words. Models not matched by
// the vocabulary's `models:` patterns fall back to the conservative estimate.
class BpeCounter : public TokenCounter {
 public:
  static BpeCounter load(const std::filesystem::path& vocab_file);

  int count(std::string_view text, const std::string& model) const override;
  bool covers_model(const std::string& model) const;
  std::size_t merge_count() const { return ranks_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, int> ranks_;
  std::vector<std::string> model_patterns_;  // "*" or prefixes
  ConservativeCounter fallback_;
};

// Resolution order: AGONE_BPE_VOCAB, then the installed data file; the
// conservative counter when neither loads.
std::shared_ptr<const TokenCounter> default_token_counter();

}  // namespace agone::prompt
