#include "java_lexer.hpp"

#include <cctype>
#include <unordered_set>

namespace agone::java::internal {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "abstract", "assert",    "boolean",  "break",    "byte",      "case",     "catch",
    "char",     "class",     "const",    "continue", "default",   "do",       "double",
    "else",     "enum",      "extends",  "final",    "finally",   "float",    "for",
    "goto",     "if",        "implements", "import", "instanceof", "int",     "interface",
    "long",     "native",    "new",      "package",  "private",   "protected", "public",
    "return",   "short",     "static",   "strictfp", "super",     "switch",   "synchronized",
    "this",     "throw",     "throws",   "transient", "try",      "void",     "volatile",
    "while",    "record",    "var",      "yield",    "sealed",    "permits",
};

const std::unordered_set<std::string_view> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
};

const std::unordered_set<std::string_view> kModifiers = {
    "public", "private", "protected", "static",   "final",      "abstract",
    "native", "strictfp", "transient", "volatile", "synchronized", "default",
    "sealed",
};

// Multi-character operators the parser cares about; longest match first.
const char* kThreeCharOps[] = {">>>", "<<=", ">>=", "...", "->*"};
const char* kTwoCharOps[] = {"&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
                             "%=", "&=", "|=", "^=", "++", "--", "<<", ">>", "->", "::"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool ident_part(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

bool is_java_keyword(std::string_view word) { return kKeywords.count(word) > 0; }
bool is_primitive_type(std::string_view word) { return kPrimitives.count(word) > 0; }
bool is_modifier(std::string_view word) { return kModifiers.count(word) > 0; }

LexResult lex(std::string_view src) {
  LexResult result;
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto push = [&](Tok kind, std::size_t start, std::size_t end) {
    result.tokens.push_back(
        {kind, std::string(src.substr(start, end - start)), start, end - start});
  };

  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    // comments
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      std::size_t start = i;
      while (i < n && src[i] != '\n') ++i;
      result.comment_spans.emplace_back(start, i - start);
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      std::size_t start = i;
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
      i = (i + 1 < n) ? i + 2 : n;
      result.comment_spans.emplace_back(start, i - start);
      continue;
    }
    // text block or string
    if (c == '"') {
      std::size_t start = i;
      if (i + 2 < n && src[i + 1] == '"' && src[i + 2] == '"') {
        i += 3;
        while (i + 2 < n && !(src[i] == '"' && src[i + 1] == '"' && src[i + 2] == '"')) ++i;
        i = (i + 2 < n) ? i + 3 : n;
      } else {
        ++i;
        while (i < n && src[i] != '"') {
          if (src[i] == '\\' && i + 1 < n) ++i;
          if (src[i] == '\n') break;  // unterminated; recover at newline
          ++i;
        }
        if (i < n && src[i] == '"') ++i;
      }
      push(Tok::String, start, i);
      continue;
    }
    if (c == '\'') {
      std::size_t start = i;
      ++i;
      while (i < n && src[i] != '\'') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        if (src[i] == '\n') break;
        ++i;
      }
      if (i < n && src[i] == '\'') ++i;
      push(Tok::CharLit, start, i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t start = i;
      while (i < n && ident_part(src[i])) ++i;
      std::string_view word = src.substr(start, i - start);
      push(is_java_keyword(word) ? Tok::Keyword : Tok::Identifier, start, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t start = i;
      bool hex = (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X'));
      if (hex) i += 2;
      while (i < n) {
        char d = src[i];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '_' || d == '.' ||
            (hex && std::isxdigit(static_cast<unsigned char>(d)))) {
          ++i;
        } else if (d == 'e' || d == 'E') {
          if (hex) break;
          ++i;
          if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
        } else if (d == 'l' || d == 'L' || d == 'f' || d == 'F' || d == 'd' || d == 'D' ||
                   (hex && (d == 'p' || d == 'P'))) {
          ++i;
          break;
        } else if (d == 'b' || d == 'B') {
          // 0b binary prefix
          if (i == start + 1 && c == '0') {
            ++i;
          } else {
            break;
          }
        } else {
          break;
        }
      }
      push(Tok::Number, start, i);
      continue;
    }
    // operators / punctuation, longest match first
    bool matched = false;
    if (i + 2 < n) {
      std::string_view three = src.substr(i, 3);
      for (const char* op : kThreeCharOps) {
        if (three == op) {
          push(Tok::Punct, i, i + 3);
          i += 3;
          matched = true;
          break;
        }
      }
    }
    if (!matched && i + 1 < n) {
      std::string_view two = src.substr(i, 2);
      for (const char* op : kTwoCharOps) {
        if (two == op) {
          push(Tok::Punct, i, i + 2);
          i += 2;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      push(Tok::Punct, i, i + 1);
      ++i;
    }
  }
  result.tokens.push_back({Tok::End, "", n, 0});
  return result;
}

}  // namespace agone::java::internal
