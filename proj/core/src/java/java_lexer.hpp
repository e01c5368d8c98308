#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace agone::java::internal {

enum class Tok {
  Identifier,
  Keyword,
  Number,
  String,
  CharLit,
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct LexResult {
  std::vector<Token> tokens;  // terminated by a Tok::End sentinel
  std::vector<std::pair<std::size_t, std::size_t>> comment_spans;
};

LexResult lex(std::string_view src);

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);
bool is_modifier(std::string_view word);

}  // namespace agone::java::internal
