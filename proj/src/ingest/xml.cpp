#include "patentlens/ingest/xml.hpp"

#include <array>
#include <cstdint>

#include "patentlens/document.hpp"
#include "patentlens/error.hpp"

namespace patentlens::ingest {

namespace {

constexpr std::array<std::string_view, 9> kInlineElements = {"b", "i", "u", "o", "sub",
                                                             "sup", "smallcaps", "claim-ref", "figref"};

bool is_inline(std::string_view name) {
  for (auto n : kInlineElements) {
    if (n == name) return true;
  }
  return false;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.' ||
         static_cast<unsigned char>(c) >= 0x80;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Unknown named entities (the bulk DTDs declare many) are kept verbatim.
void decode_entities(std::string_view in, std::string& out) {
  out.reserve(out.size() + in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '&') {
      out.push_back(in[i]);
      continue;
    }
    const auto semi = in.find(';', i);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    const std::string_view ent = in.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (ent.size() > 1 && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = true;
      if (ent[1] == 'x' || ent[1] == 'X') {
        for (char c : ent.substr(2)) {
          if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
          cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10));
          if (cp > 0x10FFFF) { ok = false; break; }
        }
        ok = ok && ent.size() > 2;
      } else {
        for (char c : ent.substr(1)) {
          if (!std::isdigit(static_cast<unsigned char>(c))) { ok = false; break; }
          cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
          if (cp > 0x10FFFF) { ok = false; break; }
        }
      }
      if (!ok) {
        out.append(in.substr(i, semi - i + 1));
      } else {
        append_utf8(out, cp);
      }
    } else {
      out.append(in.substr(i, semi - i + 1));
    }
    i = semi;
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  XmlNode parse_document() {
    skip_prolog();
    if (at_end()) fail(Errc::invalid_argument, "malformed xml");
    if (s_[pos_] != '<') fail(Errc::invalid_argument, "malformed xml");
    XmlNode root = parse_element(0);
    // Trailing comments / whitespace are tolerated; another element is not.
    while (true) {
      skip_ws();
      if (at_end()) break;
      if (starts_with("<!--")) {
        skip_past("-->");
      } else if (starts_with("<?")) {
        skip_past("?>");
      } else {
        fail(Errc::invalid_argument, "malformed xml");
      }
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  [[noreturn]] void truncated() const { fail(Errc::invalid_argument, "truncated document"); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void skip_past(std::string_view terminator) {
    const auto end = s_.find(terminator, pos_);
    if (end == std::string_view::npos) truncated();
    pos_ = end + terminator.size();
  }

  void skip_doctype() {
    // <!DOCTYPE name SYSTEM "x.dtd" [ internal subset ]>
    int bracket = 0;
    char quote = 0;
    for (pos_ += 9; !at_end(); ++pos_) {
      const char c = s_[pos_];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '[') {
        ++bracket;
      } else if (c == ']') {
        --bracket;
      } else if (c == '>' && bracket <= 0) {
        ++pos_;
        return;
      }
    }
    truncated();
  }

  void skip_prolog() {
    while (true) {
      skip_ws();
      if (starts_with("<?")) skip_past("?>");
      else if (starts_with("<!--")) skip_past("-->");
      else if (starts_with("<!DOCTYPE")) skip_doctype();
      else return;
    }
  }

  std::string parse_name() {
    const auto start = pos_;
    while (!at_end() && is_name_char(s_[pos_])) ++pos_;
    if (at_end()) truncated();
    if (pos_ == start) fail(Errc::invalid_argument, "malformed xml");
    return std::string(s_.substr(start, pos_ - start));
  }

  XmlNode parse_element(int depth) {
    if (depth > 256) fail(Errc::invalid_argument, "malformed xml");
    ++pos_;  // '<'
    XmlNode node;
    node.name = parse_name();
    while (true) {
      skip_ws();
      if (at_end()) truncated();
      if (s_[pos_] == '/') {
        if (pos_ + 1 >= s_.size()) truncated();
        if (s_[pos_ + 1] != '>') fail(Errc::invalid_argument, "malformed xml");
        pos_ += 2;
        return node;
      }
      if (s_[pos_] == '>') {
        ++pos_;
        break;
      }
      std::string attr = parse_name();
      skip_ws();
      if (at_end()) truncated();
      if (s_[pos_] != '=') fail(Errc::invalid_argument, "malformed xml");
      ++pos_;
      skip_ws();
      if (at_end()) truncated();
      const char quote = s_[pos_];
      if (quote != '"' && quote != '\'') fail(Errc::invalid_argument, "malformed xml");
      const auto end = s_.find(quote, pos_ + 1);
      if (end == std::string_view::npos) truncated();
      std::string value;
      decode_entities(s_.substr(pos_ + 1, end - pos_ - 1), value);
      node.attributes.emplace_back(std::move(attr), std::move(value));
      pos_ = end + 1;
    }

    std::string text;
    auto flush_text = [&] {
      if (text.empty()) return;
      XmlNode t;
      t.text = std::move(text);
      node.children.push_back(std::move(t));
      text.clear();
    };
    while (true) {
      if (at_end()) truncated();
      const auto lt = s_.find('<', pos_);
      if (lt == std::string_view::npos) truncated();
      decode_entities(s_.substr(pos_, lt - pos_), text);
      pos_ = lt;
      if (starts_with("</")) {
        pos_ += 2;
        const std::string closing = parse_name();
        skip_ws();
        if (at_end()) truncated();
        if (closing != node.name || s_[pos_] != '>') fail(Errc::invalid_argument, "malformed xml");
        ++pos_;
        flush_text();
        return node;
      }
      if (starts_with("<!--")) {
        skip_past("-->");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) truncated();
        text.append(s_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_past("?>");
      } else {
        flush_text();
        node.children.push_back(parse_element(depth + 1));
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void collect_text(const XmlNode& node, std::string& out) {
  for (const auto& c : node.children) {
    if (c.is_text()) {
      out += c.text;
      continue;
    }
    const bool block = !is_inline(c.name);
    if (block) out.push_back(' ');
    collect_text(c, out);
    if (block) out.push_back(' ');
  }
}

}  // namespace

const XmlNode* XmlNode::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

const XmlNode* XmlNode::find(std::string_view descendant_name) const {
  for (const auto& c : children) {
    if (c.name == descendant_name) return &c;
  }
  for (const auto& c : children) {
    if (c.is_text()) continue;
    if (const auto* hit = c.find(descendant_name)) return hit;
  }
  return nullptr;
}

void XmlNode::find_all(std::string_view descendant_name, std::vector<const XmlNode*>& out) const {
  for (const auto& c : children) {
    if (c.is_text()) continue;
    if (c.name == descendant_name) {
      out.push_back(&c);
    } else {
      c.find_all(descendant_name, out);
    }
  }
}

std::string_view XmlNode::attribute(std::string_view attr) const {
  for (const auto& [k, v] : attributes) {
    if (k == attr) return v;
  }
  return {};
}

std::string XmlNode::text_content() const {
  std::string raw;
  collect_text(*this, raw);
  return normalize_whitespace(raw);
}

XmlNode parse_xml(std::string_view text) { return Reader(text).parse_document(); }

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = p[i];
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    }
    bool ok = len > 0 && i + len <= n;
    std::uint32_t cp = ok ? (c & (0xFF >> (len + 1))) : 0;
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (p[i + k] & 0x3F);
      }
    }
    ok = ok && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      append_utf8(out, 0xFFFD);
      ++i;
    }
  }
  return out;
}

}  // namespace patentlens::ingest
