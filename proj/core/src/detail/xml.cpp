#include "agone/detail/xml.hpp"

#include <cctype>
#include <cstdlib>

#include "agone/detail/strings.hpp"

namespace agone::xml {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view doc) : doc_(doc) {}

  bool eof() const { return pos_ >= doc_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < doc_.size() ? doc_[pos_ + ahead] : '\0';
  }
  std::size_t pos() const { return pos_; }
  void advance(std::size_t n = 1) { pos_ += n; }

  bool starts_with(std::string_view s) const {
    return doc_.compare(pos_, s.size(), s) == 0;
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(doc_[pos_]))) ++pos_;
  }

  std::string_view slice(std::size_t from, std::size_t to) const {
    return doc_.substr(from, to - from);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw XmlParseError(what + " at offset " + std::to_string(pos_));
  }

 private:
  std::string_view doc_;
  std::size_t pos_ = 0;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ||
         c == ':';
}

std::string decode_entities(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out.push_back(raw[i]);
      continue;
    }
    std::size_t semi = raw.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "lt") {
      out.push_back('<');
    } else if (ent == "gt") {
      out.push_back('>');
    } else if (ent == "amp") {
      out.push_back('&');
    } else if (ent == "quot") {
      out.push_back('"');
    } else if (ent == "apos") {
      out.push_back('\'');
    } else if (!ent.empty() && ent[0] == '#') {
      long code = 0;
      if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
        code = std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16);
      } else {
        code = std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10);
      }
      if (code > 0 && code < 128) {
        out.push_back(static_cast<char>(code));
      }
    } else {
      out.append(raw.substr(i, semi - i + 1));
    }
    i = semi;
  }
  return out;
}

// Skips comments, processing instructions, doctype. Returns true if anything
// was consumed.
bool skip_misc(Cursor& c) {
  if (c.starts_with("<!--")) {
    c.advance(4);
    while (!c.eof() && !c.starts_with("-->")) c.advance();
    if (c.eof()) c.fail("unterminated comment");
    c.advance(3);
    return true;
  }
  if (c.starts_with("<?")) {
    c.advance(2);
    while (!c.eof() && !c.starts_with("?>")) c.advance();
    if (c.eof()) c.fail("unterminated processing instruction");
    c.advance(2);
    return true;
  }
  if (c.starts_with("<!DOCTYPE") || c.starts_with("<!doctype")) {
    while (!c.eof() && c.peek() != '>') c.advance();
    if (c.eof()) c.fail("unterminated doctype");
    c.advance();
    return true;
  }
  return false;
}

std::string parse_name(Cursor& c) {
  std::size_t start = c.pos();
  while (!c.eof() && is_name_char(c.peek())) c.advance();
  if (c.pos() == start) c.fail("expected name");
  return std::string(c.slice(start, c.pos()));
}

Element parse_element(Cursor& c) {
  Element el;
  el.start = c.pos();
  if (c.peek() != '<') c.fail("expected '<'");
  c.advance();
  el.name = parse_name(c);

  // attributes
  while (true) {
    c.skip_ws();
    if (c.eof()) c.fail("unterminated start tag");
    if (c.peek() == '>' || c.starts_with("/>")) break;
    std::string attr_name = parse_name(c);
    c.skip_ws();
    std::string attr_value;
    if (c.peek() == '=') {
      c.advance();
      c.skip_ws();
      char quote = c.peek();
      if (quote != '"' && quote != '\'') c.fail("expected quoted attribute value");
      c.advance();
      std::size_t vstart = c.pos();
      while (!c.eof() && c.peek() != quote) c.advance();
      if (c.eof()) c.fail("unterminated attribute value");
      attr_value = decode_entities(c.slice(vstart, c.pos()));
      c.advance();
    }
    el.attributes.emplace_back(std::move(attr_name), std::move(attr_value));
  }

  if (c.starts_with("/>")) {
    c.advance(2);
    el.end = c.pos();
    el.content_start = el.content_end = el.end;
    return el;
  }
  c.advance();  // '>'
  el.content_start = c.pos();

  while (true) {
    if (c.eof()) c.fail("missing end tag for <" + el.name + ">");
    if (c.peek() == '<') {
      if (c.starts_with("</")) {
        el.content_end = c.pos();
        c.advance(2);
        std::string closing = parse_name(c);
        if (closing != el.name) c.fail("mismatched end tag </" + closing + ">");
        c.skip_ws();
        if (c.peek() != '>') c.fail("malformed end tag");
        c.advance();
        el.end = c.pos();
        return el;
      }
      if (c.starts_with("<![CDATA[")) {
        c.advance(9);
        std::size_t dstart = c.pos();
        while (!c.eof() && !c.starts_with("]]>")) c.advance();
        if (c.eof()) c.fail("unterminated CDATA");
        el.text.append(c.slice(dstart, c.pos()));
        c.advance(3);
        continue;
      }
      if (skip_misc(c)) continue;
      el.children.push_back(parse_element(c));
      continue;
    }
    std::size_t tstart = c.pos();
    while (!c.eof() && c.peek() != '<') c.advance();
    el.text.append(decode_entities(c.slice(tstart, c.pos())));
  }
}

}  // namespace

const Element* Element::child(std::string_view child_name) const {
  for (const auto& ch : children) {
    if (ch.name == child_name) return &ch;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& ch : children) {
    if (ch.name == child_name) out.push_back(&ch);
  }
  return out;
}

std::string Element::attribute(std::string_view attr_name) const {
  for (const auto& [k, v] : attributes) {
    if (k == attr_name) return v;
  }
  return {};
}

bool Element::has_attribute(std::string_view attr_name) const {
  for (const auto& [k, v] : attributes) {
    if (k == attr_name) return true;
  }
  return false;
}

std::string Element::child_text(std::string_view child_name) const {
  const Element* ch = child(child_name);
  if (!ch) return {};
  return std::string(detail::trim(ch->text));
}

Element parse(std::string_view doc) {
  Cursor c(doc);
  while (true) {
    c.skip_ws();
    if (c.eof()) throw XmlParseError("document has no root element");
    if (c.peek() != '<') c.fail("expected markup");
    if (skip_misc(c)) continue;
    break;
  }
  return parse_element(c);
}

std::string escape_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace agone::xml
