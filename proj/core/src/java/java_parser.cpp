#include <optional>
#include <unordered_set>

#include "agone/java_analysis.hpp"
#include "java_lexer.hpp"

namespace agone::java {

namespace {

using internal::Tok;
using internal::Token;

// `File` objects are tracked separately from the stream/path APIs so the
// resource-optimism and mystery-guest substrates stay distinct.
const std::unordered_set<std::string> kResourceClasses = {
    "FileReader",       "FileWriter", "FileInputStream", "FileOutputStream",
    "RandomAccessFile", "Scanner",
};

bool uppercase_start(const std::string& s) {
  return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}

int min_args_without_message(const std::string& name) {
  if (name == "fail") return 0;
  if (name == "assertTrue" || name == "assertFalse" || name == "assertNull" ||
      name == "assertNotNull" || name == "assertDoesNotThrow" || name == "assumeTrue" ||
      name == "assumeFalse") {
    return 1;
  }
  return 2;
}

bool is_assertion_name(const std::string& name) {
  return name.rfind("assert", 0) == 0 || name == "fail" || name == "verify" ||
         name == "expectThrows";
}

// Analyzes the token range of one method body and fills the structural
// counters of `m`. The scan is flat: anonymous-class and lambda bodies are
// visited as part of the enclosing method.
class BodyAnalyzer {
 public:
  BodyAnalyzer(std::string_view src, const std::vector<Token>& toks, std::string enclosing_type)
      : src_(src), toks_(toks), enclosing_type_(std::move(enclosing_type)) {}

  void analyze(std::size_t begin, std::size_t end, MethodDecl& m) {
    m_ = &m;
    begin_ = begin;
    end_ = end;
    for (std::size_t i = 0; i < m.param_names.size(); ++i) {
      var_types_[m.param_names[i]] = simple_type(m.param_types[i]);
    }
    mark_call_parens();
    run();
  }

 private:
  const Token& at(std::size_t i) const {
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool is_punct(std::size_t i, std::string_view s) const {
    return at(i).kind == Tok::Punct && at(i).text == s;
  }
  bool is_kw(std::size_t i, std::string_view s) const {
    return at(i).kind == Tok::Keyword && at(i).text == s;
  }

  static std::string simple_type(const std::string& type_text) {
    std::string t = type_text;
    auto lt = t.find('<');
    if (lt != std::string::npos) t = t.substr(0, lt);
    auto br = t.find('[');
    if (br != std::string::npos) t = t.substr(0, br);
    auto dot = t.rfind('.');
    if (dot != std::string::npos) t = t.substr(dot + 1);
    while (!t.empty() && t.back() == ' ') t.pop_back();
    return t;
  }

  std::string slice(std::size_t first_tok, std::size_t last_tok) const {
    if (first_tok > last_tok || at(first_tok).kind == Tok::End) return {};
    std::size_t from = at(first_tok).offset;
    std::size_t to = at(last_tok).offset + at(last_tok).size;
    std::string out(src_.substr(from, to - from));
    // collapse newlines so argument texts compare stably
    for (char& c : out) {
      if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return out;
  }

  std::size_t matching_paren(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < end_; ++i) {
      if (is_punct(i, "(")) ++depth;
      if (is_punct(i, ")")) {
        --depth;
        if (depth == 0) return i;
      }
    }
    return end_;
  }

  void mark_call_parens() {
    for (std::size_t i = begin_; i + 1 < end_; ++i) {
      if (!is_punct(i + 1, "(")) continue;
      const Token& t = at(i);
      if (t.kind == Tok::Identifier ||
          (t.kind == Tok::Keyword && (t.text == "this" || t.text == "super"))) {
        call_parens_.insert(i + 1);
      }
    }
  }

  // Registers `Type name` / `var name = new Type` declarations starting at i.
  // Returns the token index of the declared name when matched.
  void try_register_declaration(std::size_t i) {
    const Token& t = at(i);
    bool type_start = (t.kind == Tok::Identifier && uppercase_start(t.text)) ||
                      (t.kind == Tok::Keyword &&
                       (internal::is_primitive_type(t.text) || t.text == "var"));
    if (!type_start) return;
    if (i > begin_ && is_punct(i - 1, ".")) return;

    std::string base = t.text;
    std::size_t j = i + 1;
    while (is_punct(j, ".") && at(j + 1).kind == Tok::Identifier) {
      base = at(j + 1).text;
      j += 2;
    }
    if (is_punct(j, "<")) {
      std::size_t closed = skip_generics(j);
      if (closed == j) return;
      j = closed;
    }
    while (is_punct(j, "[") && is_punct(j + 1, "]")) j += 2;
    if (at(j).kind != Tok::Identifier) return;
    std::string name = at(j).text;
    std::size_t after = j + 1;
    while (is_punct(after, "[") && is_punct(after + 1, "]")) after += 2;
    if (!(is_punct(after, "=") || is_punct(after, ";") || is_punct(after, ":") ||
          is_punct(after, ","))) {
      return;
    }
    std::string type_name = base;
    if (t.text == "var" && is_punct(after, "=") && is_kw(after + 1, "new") &&
        at(after + 2).kind == Tok::Identifier) {
      type_name = at(after + 2).text;
      std::size_t k = after + 3;
      while (is_punct(k, ".") && at(k + 1).kind == Tok::Identifier) {
        type_name = at(k + 1).text;
        k += 2;
      }
    }
    if (type_name != "var") var_types_[name] = type_name;
  }

  // Returns index one past the balanced generic argument list opened at `i`
  // ('<'), or `i` when the tokens do not look like generics.
  std::size_t skip_generics(std::size_t i) const {
    if (!is_punct(i, "<")) return i;
    int depth = 0;
    for (std::size_t j = i; j < end_ && j < i + 64; ++j) {
      const Token& t = at(j);
      if (t.kind != Tok::Punct) {
        if (t.kind == Tok::String || t.kind == Tok::Number) return i;
        continue;
      }
      if (t.text == "<") ++depth;
      else if (t.text == ">") depth -= 1;
      else if (t.text == ">>") depth -= 2;
      else if (t.text == ">>>") depth -= 3;
      else if (t.text == ";" || t.text == "{" || t.text == ")" || t.text == "=") return i;
      if (depth <= 0) return j + 1;
    }
    return i;
  }

  void handle_new(std::size_t& i) {
    std::size_t j = i + 1;
    if (at(j).kind != Tok::Identifier && !internal::is_primitive_type(at(j).text)) return;
    std::string type_name = at(j).text;
    ++j;
    while (is_punct(j, ".") && at(j + 1).kind == Tok::Identifier) {
      type_name = at(j + 1).text;
      j += 2;
    }
    std::size_t after_generics = skip_generics(j);
    j = after_generics;
    if (is_punct(j, "(")) {
      m_->constructed_types[type_name]++;
      if (type_name == "File") {
        m_->file_objects++;
      } else if (kResourceClasses.count(type_name)) {
        m_->file_api_uses++;
      }
      i = j - 1;  // resume right before '(' so args are scanned normally
    } else {
      i = j - 1;  // array creation or malformed; skip the type tokens
    }
  }

  void record_invocation(std::size_t name_idx, std::size_t open_idx) {
    const std::string& name = at(name_idx).text;
    std::size_t close_idx = matching_paren(open_idx);

    // receiver chain
    std::vector<std::string> chain;
    std::string receiver_text;
    bool chained_expr = false;
    std::size_t j = name_idx;
    while (j > begin_ && is_punct(j - 1, ".")) {
      const Token& prev = at(j - 2);
      if (prev.kind == Tok::Identifier ||
          (prev.kind == Tok::Keyword && (prev.text == "this" || prev.text == "super"))) {
        chain.insert(chain.begin(), prev.text);
        j -= 2;
      } else {
        chained_expr = true;
        break;
      }
    }
    if (chained_expr) {
      receiver_text = "<expr>";
    } else {
      for (std::size_t k = 0; k < chain.size(); ++k) {
        if (k > 0) receiver_text += ".";
        receiver_text += chain[k];
      }
    }

    std::string hint;
    if (!chain.empty() && !chained_expr) {
      if (chain[0] == "this" && chain.size() == 1) {
        hint = enclosing_type_;
      } else if (chain.size() == 1) {
        auto it = var_types_.find(chain[0]);
        if (it != var_types_.end()) {
          hint = it->second;
        } else if (uppercase_start(chain[0])) {
          hint = chain[0];  // static call
        }
      }
    }

    // top-level argument slices
    std::vector<std::string> args;
    int depth = 0;
    std::size_t arg_first = open_idx + 1;
    for (std::size_t k = open_idx; k <= close_idx && k < end_; ++k) {
      if (is_punct(k, "(")) ++depth;
      if (is_punct(k, ")")) --depth;
      bool at_boundary = (depth == 1 && is_punct(k, ",")) || (depth == 0 && k == close_idx);
      if (at_boundary) {
        if (k > arg_first) {
          args.push_back(slice(arg_first, k - 1));
        } else if (is_punct(k, ",")) {
          args.push_back("");
        }
        arg_first = k + 1;
      }
    }

    InvocationSite site{receiver_text, hint, name, args};
    m_->invocations.push_back(site);

    if (receiver_text == "System.out" || receiver_text == "System.err") {
      if (name.rfind("print", 0) == 0) m_->print_calls++;
    }
    if (name == "sleep") m_->sleep_calls++;
    if (name == "exists" || name == "notExists" || name == "isFile") {
      m_->has_existence_check = true;
    }
    if (!chain.empty() && (chain[0] == "Files" || chain[0] == "Paths")) {
      m_->file_api_uses++;
    }
    if (name == "getConnection") m_->file_api_uses++;

    if (name == "mock" || name == "spy") {
      if (!args.empty()) {
        std::string a = args[0];
        auto pos = a.rfind(".class");
        if (pos != std::string::npos) {
          std::string target = simple_type(a.substr(0, pos));
          if (!target.empty()) m_->mock_targets[target]++;
        }
      }
    } else if (name == "when" || name == "given" || name == "verify") {
      if (!args.empty()) {
        std::string head = args[0];
        auto cut = head.find_first_of(".( ");
        std::string var = (cut == std::string::npos) ? head : head.substr(0, cut);
        auto it = var_types_.find(var);
        if (it != var_types_.end()) m_->mock_targets[it->second]++;
      }
    }

    if (is_assertion_name(name)) {
      AssertionCall call;
      call.method_name = name;
      call.arg_count = static_cast<int>(args.size());
      call.args_textual = args;
      call.enclosing_method = m_->name;
      if (name == "verify") {
        call.has_message = true;  // verification call, not a message-bearing assertion
      } else {
        int min_args = min_args_without_message(name);
        bool first_is_string = !args.empty() && !args.front().empty() && args.front()[0] == '"';
        bool last_is_string = !args.empty() && !args.back().empty() && args.back()[0] == '"';
        call.has_message =
            static_cast<int>(args.size()) > min_args && (first_is_string || last_is_string);
      }
      for (std::size_t k = open_idx + 1; k < close_idx && k < end_; ++k) {
        if (at(k).kind == Tok::Number) call.numeric_literal_args++;
        if (at(k).kind == Tok::Identifier && at(k).text == "toString" && is_punct(k + 1, "(")) {
          call.tostring_in_args++;
        }
      }
      m_->assertions.push_back(std::move(call));
    }
  }

  void run() {
    std::vector<bool> call_stack;
    for (std::size_t i = begin_; i < end_; ++i) {
      const Token& t = at(i);
      if (t.kind == Tok::Punct) {
        if (t.text == "(") {
          call_stack.push_back(call_parens_.count(i) > 0);
        } else if (t.text == ")") {
          if (!call_stack.empty()) call_stack.pop_back();
        } else if (t.text == "&&" || t.text == "||") {
          m_->decision_points++;
        } else if (t.text == "?") {
          bool wildcard = (i > begin_ && (is_punct(i - 1, "<") || is_punct(i - 1, ","))) ||
                          is_kw(i + 1, "extends") || is_kw(i + 1, "super") ||
                          is_punct(i + 1, ">") || is_punct(i + 1, ",") || is_punct(i + 1, ")");
          if (!wildcard) m_->decision_points++;
        }
        continue;
      }
      if (t.kind == Tok::Number) {
        bool in_call = false;
        for (bool c : call_stack) in_call = in_call || c;
        if (in_call) m_->numeric_literal_args.push_back(t.text);
        continue;
      }
      if (t.kind == Tok::Keyword) {
        if (t.text == "if" || t.text == "for" || t.text == "while" || t.text == "do" ||
            t.text == "switch") {
          m_->control_flow_statements++;
          if (t.text != "switch") m_->decision_points++;
        } else if (t.text == "case") {
          m_->decision_points++;
        } else if (t.text == "catch") {
          m_->decision_points++;
          m_->has_try = true;
        } else if (t.text == "try") {
          m_->has_try = true;
        } else if (t.text == "throw") {
          m_->has_throw = true;
        } else if (t.text == "new") {
          handle_new(i);
        }
        continue;
      }
      if (t.kind == Tok::Identifier) {
        m_->identifiers_used.insert(t.text);
        bool assigned = is_punct(i + 1, "=") || is_punct(i + 1, "+=") || is_punct(i + 1, "-=") ||
                        is_punct(i + 1, "*=") || is_punct(i + 1, "/=");
        if (assigned && !(i > begin_ && is_punct(i - 1, "."))) {
          m_->identifiers_assigned.insert(t.text);
        }
        if (i >= begin_ + 2 && is_punct(i - 1, ".") && is_kw(i - 2, "this") &&
            is_punct(i + 1, "=")) {
          m_->identifiers_assigned.insert(t.text);
        }
        if (is_punct(i + 1, "(") && !(i > begin_ && is_kw(i - 1, "new"))) {
          record_invocation(i, i + 1);
        } else {
          try_register_declaration(i);
        }
        continue;
      }
    }
  }

  std::string_view src_;
  const std::vector<Token>& toks_;
  std::string enclosing_type_;
  MethodDecl* m_ = nullptr;
  std::size_t begin_ = 0, end_ = 0;
  std::map<std::string, std::string> var_types_;
  std::set<std::size_t> call_parens_;
};

class Parser {
 public:
  Parser(std::string_view src, internal::LexResult lexed)
      : src_(src), toks_(std::move(lexed.tokens)) {
    unit_.comment_spans = std::move(lexed.comment_spans);
  }

  JavaSourceUnit parse(const std::filesystem::path& path) {
    unit_.path = path;
    unit_.raw_text = std::string(src_);
    parse_package_and_imports();
    while (at(idx_).kind != Tok::End) {
      std::size_t before = idx_;
      parse_top_level();
      if (idx_ == before) {
        unit_.degraded = true;
        ++idx_;
      }
    }
    if (unit_.types.empty()) {
      throw UnparseableSource("no top-level type could be recovered" +
                              (path.empty() ? std::string() : " in " + path.string()));
    }
    for (const auto& t : unit_.types) unit_.type_names.push_back(t.name);
    return std::move(unit_);
  }

 private:
  const Token& at(std::size_t i) const {
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool is_punct(std::size_t i, std::string_view s) const {
    return at(i).kind == Tok::Punct && at(i).text == s;
  }
  bool is_kw(std::size_t i, std::string_view s) const {
    return at(i).kind == Tok::Keyword && at(i).text == s;
  }

  std::string read_qualified_name() {
    std::string name;
    while (at(idx_).kind == Tok::Identifier ||
           (at(idx_).kind == Tok::Keyword && !is_kw(idx_, "import"))) {
      name += at(idx_).text;
      ++idx_;
      if (is_punct(idx_, ".")) {
        name += ".";
        ++idx_;
        if (is_punct(idx_, "*")) {
          name += "*";
          ++idx_;
          break;
        }
      } else {
        break;
      }
    }
    return name;
  }

  void skip_annotation(std::vector<Annotation>* sink) {
    ++idx_;  // '@'
    std::string name;
    while (at(idx_).kind == Tok::Identifier) {
      name = at(idx_).text;
      ++idx_;
      if (is_punct(idx_, ".")) {
        ++idx_;
      } else {
        break;
      }
    }
    std::string args;
    if (is_punct(idx_, "(")) {
      std::size_t open = idx_;
      std::size_t close = match_parens(open);
      if (close > open + 1) {
        args = std::string(
            src_.substr(at(open + 1).offset,
                        at(close).offset - at(open + 1).offset));
      }
      idx_ = close + 1;
    }
    if (sink && !name.empty()) sink->push_back({name, args});
  }

  std::size_t match_parens(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; at(i).kind != Tok::End; ++i) {
      if (is_punct(i, "(")) ++depth;
      if (is_punct(i, ")")) {
        --depth;
        if (depth == 0) return i;
      }
    }
    return toks_.size() - 1;
  }

  std::size_t match_braces(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; at(i).kind != Tok::End; ++i) {
      if (is_punct(i, "{")) ++depth;
      if (is_punct(i, "}")) {
        --depth;
        if (depth == 0) return i;
      }
    }
    return toks_.size() - 1;
  }

  std::size_t skip_generics(std::size_t i) const {
    if (!is_punct(i, "<")) return i;
    int depth = 0;
    for (std::size_t j = i; at(j).kind != Tok::End && j < i + 64; ++j) {
      const Token& t = at(j);
      if (t.kind != Tok::Punct) continue;
      if (t.text == "<") ++depth;
      else if (t.text == ">") depth -= 1;
      else if (t.text == ">>") depth -= 2;
      else if (t.text == ">>>") depth -= 3;
      else if (t.text == ";" || t.text == "{" || t.text == "=") return i;
      if (depth <= 0) return j + 1;
    }
    return i;
  }

  void parse_package_and_imports() {
    while (is_punct(idx_, "@")) skip_annotation(nullptr);
    if (is_kw(idx_, "package")) {
      ++idx_;
      unit_.package_name = read_qualified_name();
      if (is_punct(idx_, ";")) ++idx_;
    }
    while (is_kw(idx_, "import")) {
      ++idx_;
      if (is_kw(idx_, "static")) ++idx_;
      std::string imp = read_qualified_name();
      if (!imp.empty()) unit_.imports.push_back(imp);
      while (!is_punct(idx_, ";") && at(idx_).kind != Tok::End) ++idx_;
      if (is_punct(idx_, ";")) ++idx_;
    }
  }

  void parse_top_level() {
    std::vector<Annotation> annotations;
    while (true) {
      if (is_punct(idx_, ";")) {
        ++idx_;
        continue;
      }
      if (is_punct(idx_, "@") && at(idx_ + 1).kind == Tok::Identifier) {
        skip_annotation(&annotations);
        continue;
      }
      if (at(idx_).kind == Tok::Keyword && internal::is_modifier(at(idx_).text)) {
        ++idx_;
        continue;
      }
      if (at(idx_).kind == Tok::Identifier && at(idx_).text == "non") {
        // tolerate 'non-sealed'
        ++idx_;
        continue;
      }
      break;
    }
    if (is_kw(idx_, "class") || is_kw(idx_, "interface") || is_kw(idx_, "enum") ||
        is_kw(idx_, "record") ||
        (is_punct(idx_, "@") && is_kw(idx_ + 1, "interface"))) {
      if (auto type = parse_type(std::move(annotations))) {
        unit_.types.push_back(std::move(*type));
      }
      return;
    }
    // Unrecognized top-level construct: recover at the next type keyword.
    unit_.degraded = true;
    while (at(idx_).kind != Tok::End) {
      if (is_kw(idx_, "class") || is_kw(idx_, "interface") || is_kw(idx_, "enum") ||
          is_kw(idx_, "record")) {
        return;
      }
      if (is_punct(idx_, "{")) {
        idx_ = match_braces(idx_) + 1;
        continue;
      }
      ++idx_;
    }
  }

  // Returns nullopt when the declaration never reaches a body (prose or badly
  // truncated input); the caller records degradation.
  std::optional<TypeDecl> parse_type(std::vector<Annotation> annotations) {
    TypeDecl type;
    type.annotations = std::move(annotations);
    if (is_punct(idx_, "@")) {
      ++idx_;
      type.kind = "@interface";
      ++idx_;
    } else {
      type.kind = at(idx_).text;
      ++idx_;
    }
    if (at(idx_).kind == Tok::Identifier) {
      type.name = at(idx_).text;
      ++idx_;
    } else {
      unit_.degraded = true;
      return std::nullopt;
    }
    idx_ = skip_generics(idx_);
    if (type.kind == "record" && is_punct(idx_, "(")) {
      std::size_t close = match_parens(idx_);
      parse_record_components(idx_, close, type);
      idx_ = close + 1;
    }
    while (at(idx_).kind != Tok::End && !is_punct(idx_, "{") && !is_punct(idx_, ";")) {
      idx_ = (is_punct(idx_, "<")) ? skip_generics(idx_) : idx_ + 1;
    }
    if (!is_punct(idx_, "{")) {
      unit_.degraded = true;
      return std::nullopt;
    }
    ++idx_;  // '{'
    std::string outer = current_type_name_;
    current_type_name_ = type.name;
    parse_body(type);
    current_type_name_ = outer;
    return type;
  }

  void parse_record_components(std::size_t open, std::size_t close, TypeDecl& type) {
    std::size_t i = open + 1;
    while (i < close) {
      std::size_t comma = i;
      int depth = 0;
      while (comma < close) {
        if (is_punct(comma, "(") || is_punct(comma, "<")) ++depth;
        if (is_punct(comma, ")") || is_punct(comma, ">")) --depth;
        if (depth == 0 && is_punct(comma, ",")) break;
        ++comma;
      }
      if (comma > i + 1 && at(comma - 1).kind == Tok::Identifier) {
        FieldDecl f;
        f.name = at(comma - 1).text;
        f.type = std::string(src_.substr(at(i).offset,
                                         at(comma - 1).offset - at(i).offset));
        type.fields.push_back(std::move(f));
      }
      i = comma + 1;
    }
  }

  void parse_enum_constants() {
    while (at(idx_).kind != Tok::End) {
      if (is_punct(idx_, ";")) {
        ++idx_;
        return;
      }
      if (is_punct(idx_, "}")) return;  // body end handled by caller
      if (is_punct(idx_, "(")) {
        idx_ = match_parens(idx_) + 1;
        continue;
      }
      if (is_punct(idx_, "{")) {
        idx_ = match_braces(idx_) + 1;
        continue;
      }
      ++idx_;
    }
  }

  void parse_body(TypeDecl& type) {
    if (type.kind == "enum") parse_enum_constants();
    while (true) {
      if (at(idx_).kind == Tok::End) {
        unit_.degraded = true;
        return;
      }
      if (is_punct(idx_, "}")) {
        ++idx_;
        return;
      }
      if (is_punct(idx_, ";")) {
        ++idx_;
        continue;
      }
      std::size_t before = idx_;
      parse_member(type);
      if (idx_ == before) {
        unit_.degraded = true;
        ++idx_;
      }
    }
  }

  void parse_member(TypeDecl& type) {
    std::size_t member_start = idx_;
    std::vector<Annotation> annotations;
    std::set<std::string> modifiers;
    while (true) {
      if (is_punct(idx_, "@") && at(idx_ + 1).kind == Tok::Identifier &&
          !is_kw(idx_ + 1, "interface")) {
        skip_annotation(&annotations);
        continue;
      }
      if (at(idx_).kind == Tok::Keyword && internal::is_modifier(at(idx_).text)) {
        modifiers.insert(at(idx_).text);
        ++idx_;
        continue;
      }
      break;
    }

    if (is_kw(idx_, "class") || is_kw(idx_, "interface") || is_kw(idx_, "enum") ||
        is_kw(idx_, "record") || (is_punct(idx_, "@") && is_kw(idx_ + 1, "interface"))) {
      if (auto nested = parse_type(std::move(annotations))) {
        type.nested.push_back(std::move(*nested));
      }
      return;
    }

    if (is_punct(idx_, "{")) {
      // static or instance initializer block
      MethodDecl m;
      m.name = "<initializer>";
      m.is_initializer = true;
      m.is_static = modifiers.count("static") > 0;
      m.decl_begin = at(member_start).offset;
      analyze_method_body(m, idx_);
      type.methods.push_back(std::move(m));
      return;
    }

    // Decide member kind from the first structural token at depth zero.
    std::size_t probe = idx_;
    char kind = 0;
    {
      int depth = 0;
      for (std::size_t i = idx_; at(i).kind != Tok::End; ++i) {
        if (is_punct(i, "<")) {
          std::size_t closed = skip_generics(i);
          if (closed > i) {
            i = closed - 1;
            continue;
          }
        }
        if (is_punct(i, "[")) ++depth;
        if (is_punct(i, "]")) --depth;
        if (depth != 0) continue;
        if (is_punct(i, "(")) {
          kind = '(';
          probe = i;
          break;
        }
        if (is_punct(i, "=") || is_punct(i, ";")) {
          kind = at(i).text[0];
          probe = i;
          break;
        }
        if (is_punct(i, "{") || is_punct(i, "}")) {
          kind = '!';
          probe = i;
          break;
        }
      }
    }

    if (kind == '(') {
      parse_method(type, member_start, std::move(annotations), modifiers, probe);
    } else if (kind == '=' || kind == ';') {
      parse_fields(type, std::move(annotations), probe);
    } else {
      // malformed member: skip to a safe point
      unit_.degraded = true;
      while (at(idx_).kind != Tok::End && !is_punct(idx_, ";") && !is_punct(idx_, "}")) {
        if (is_punct(idx_, "{")) {
          idx_ = match_braces(idx_) + 1;
          return;
        }
        ++idx_;
      }
      if (is_punct(idx_, ";")) ++idx_;
    }
  }

  void parse_method(TypeDecl& type, std::size_t member_start, std::vector<Annotation> annotations,
                    const std::set<std::string>& modifiers, std::size_t open_paren) {
    MethodDecl m;
    m.annotations = std::move(annotations);
    m.is_public = modifiers.count("public") > 0;
    m.is_private = modifiers.count("private") > 0;
    m.is_static = modifiers.count("static") > 0;
    m.decl_begin = at(member_start).offset;

    std::size_t name_idx = open_paren - 1;
    if (at(name_idx).kind != Tok::Identifier) {
      unit_.degraded = true;
      idx_ = match_parens(open_paren) + 1;
      if (is_punct(idx_, "{")) idx_ = match_braces(idx_) + 1;
      return;
    }
    m.name = at(name_idx).text;
    m.is_constructor = (name_idx == idx_) && (m.name == type.name);

    std::size_t close_paren = match_parens(open_paren);
    parse_params(open_paren, close_paren, m);

    idx_ = close_paren + 1;
    while (at(idx_).kind != Tok::End && !is_punct(idx_, "{") && !is_punct(idx_, ";") &&
           !is_punct(idx_, "}")) {
      // throws clause, annotation-member defaults
      ++idx_;
    }
    if (is_punct(idx_, "{")) {
      analyze_method_body(m, idx_);
    } else if (is_punct(idx_, ";")) {
      ++idx_;
    }
    type.methods.push_back(std::move(m));
  }

  void parse_params(std::size_t open, std::size_t close, MethodDecl& m) {
    std::size_t i = open + 1;
    while (i < close) {
      std::size_t comma = i;
      int depth = 0;
      while (comma < close) {
        if (is_punct(comma, "(") || is_punct(comma, "[")) ++depth;
        if (is_punct(comma, ")") || is_punct(comma, "]")) --depth;
        if (is_punct(comma, "<")) {
          std::size_t closed = skip_generics(comma);
          if (closed > comma) {
            comma = closed - 1;
          }
        }
        if (depth == 0 && is_punct(comma, ",")) break;
        ++comma;
      }
      // last identifier in the segment is the name; the rest is the type
      std::size_t last_ident = 0;
      for (std::size_t j = i; j < comma; ++j) {
        if (at(j).kind == Tok::Identifier) last_ident = j;
      }
      if (last_ident > i) {
        m.param_names.push_back(at(last_ident).text);
        m.param_types.push_back(std::string(
            src_.substr(at(i).offset, at(last_ident).offset - at(i).offset)));
      } else if (last_ident == i && at(i).kind == Tok::Identifier && comma == i + 1) {
        // bare name (e.g. lambda-style), no type
        m.param_names.push_back(at(i).text);
        m.param_types.push_back("");
      }
      i = comma + 1;
    }
  }

  void analyze_method_body(MethodDecl& m, std::size_t open_brace) {
    std::size_t close_brace = match_braces(open_brace);
    m.has_body = true;
    m.body_empty = (close_brace == open_brace + 1);
    m.body_begin = at(open_brace).offset;
    m.body_end = at(close_brace).offset + at(close_brace).size;
    BodyAnalyzer analyzer(src_, toks_, current_type_name_);
    analyzer.analyze(open_brace + 1, close_brace, m);
    idx_ = close_brace + 1;
  }

  void parse_fields(TypeDecl& type, std::vector<Annotation> annotations, std::size_t stop) {
    // type text = tokens from idx_ up to the first declared name
    std::size_t i = idx_;
    const Token& first = at(i);
    bool plausible_type = first.kind == Tok::Identifier ||
                          (first.kind == Tok::Keyword &&
                           (internal::is_primitive_type(first.text) || first.text == "var"));
    if (!plausible_type) {
      unit_.degraded = true;
      idx_ = stop + 1;
      return;
    }
    ++i;
    while (is_punct(i, ".") && at(i + 1).kind == Tok::Identifier) i += 2;
    std::size_t g = skip_generics(i);
    i = g;
    while (is_punct(i, "[") && is_punct(i + 1, "]")) i += 2;
    std::string type_text(
        src_.substr(at(idx_).offset, at(i).offset - at(idx_).offset));
    while (!type_text.empty() && std::isspace(static_cast<unsigned char>(type_text.back()))) {
      type_text.pop_back();
    }

    while (at(i).kind != Tok::End) {
      if (at(i).kind != Tok::Identifier) {
        unit_.degraded = true;
        break;
      }
      FieldDecl field;
      field.name = at(i).text;
      field.type = type_text;
      field.annotations = annotations;
      ++i;
      while (is_punct(i, "[") && is_punct(i + 1, "]")) i += 2;
      if (is_punct(i, "=")) {
        field.initialized_at_declaration = true;
        int depth = 0;
        ++i;
        while (at(i).kind != Tok::End) {
          if (is_punct(i, "(") || is_punct(i, "[") || is_punct(i, "{")) ++depth;
          if (is_punct(i, ")") || is_punct(i, "]") || is_punct(i, "}")) --depth;
          if (depth == 0 && (is_punct(i, ",") || is_punct(i, ";"))) break;
          if (depth < 0) break;
          ++i;
        }
      }
      type.fields.push_back(std::move(field));
      if (is_punct(i, ",")) {
        ++i;
        continue;
      }
      break;
    }
    if (is_punct(i, ";")) ++i;
    idx_ = i;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  JavaSourceUnit unit_;
  std::string current_type_name_;
};

}  // namespace

bool MethodDecl::has_annotation(std::string_view n) const {
  for (const auto& a : annotations) {
    if (a.name == n) return true;
  }
  return false;
}

JavaSourceUnit parse_unit(std::string_view source_text, const std::filesystem::path& path) {
  Parser parser(source_text, internal::lex(source_text));
  return parser.parse(path);
}

}  // namespace agone::java
