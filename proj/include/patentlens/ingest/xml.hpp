#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patentlens::ingest {

/// Minimal DOM produced by the tolerant reader. Text and element children are
/// kept in document order; text nodes have an empty name.
struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;

  bool is_text() const { return name.empty(); }

  const XmlNode* child(std::string_view child_name) const;
  const XmlNode* find(std::string_view descendant_name) const;
  void find_all(std::string_view descendant_name, std::vector<const XmlNode*>& out) const;
  std::string_view attribute(std::string_view attr) const;

  /// Concatenated descendant text, whitespace-normalized. Block-level element
  /// boundaries become spaces; inline markup (b, i, sub, sup, ...) does not.
  std::string text_content() const;
};

/// Parses one standalone document. The prolog (declaration, DOCTYPE with an
/// internal subset, comments, processing instructions) is skipped, and no DTD
/// is fetched. Throws Error(invalid_argument) with "truncated document" when
/// the input ends inside the root element, "malformed xml" otherwise.
XmlNode parse_xml(std::string_view text);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

}  // namespace patentlens::ingest
