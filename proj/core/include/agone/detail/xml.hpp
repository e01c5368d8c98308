#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agone/errors.hpp"

namespace agone::xml {

AGONE_DEFINE_ERROR(XmlParseError);

// DOM node with source offsets so callers can splice edits back into the
// original document without re-serializing (keeps untouched bytes intact).
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // character data directly inside this element, entity-decoded

  std::size_t start = 0;          // offset of '<' of the start tag
  std::size_t end = 0;            // offset one past '>' of the end (or self-closing) tag
  std::size_t content_start = 0;  // offset one past '>' of the start tag
  std::size_t content_end = 0;    // offset of '<' of the end tag

  const Element* child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
  std::string attribute(std::string_view attr_name) const;  // "" when absent
  bool has_attribute(std::string_view attr_name) const;
  std::string child_text(std::string_view child_name) const;  // trimmed, "" when absent
};

// Parses one document and returns its root element. Comments, prolog,
// doctype and CDATA are accepted; &lt; &gt; &amp; &quot; &apos; and numeric
// character references are decoded.
Element parse(std::string_view doc);

std::string escape_text(std::string_view raw);

}  // namespace agone::xml
