#include "patentlens/ingest/splitter.hpp"

#include <cctype>

namespace patentlens::ingest {

namespace {

constexpr std::string_view kDeclaration = "<?xml";
constexpr std::string_view kBoundary = "\n<?xml";

}  // namespace

ChunkSplitter::ChunkSplitter(std::istream& in, std::string source_file, std::size_t block_size)
    : in_(in), source_file_(std::move(source_file)), block_size_(block_size) {}

bool ChunkSplitter::fill() {
  if (eof_) return false;
  const auto old = buffer_.size();
  buffer_.resize(old + block_size_);
  in_.read(buffer_.data() + old, static_cast<std::streamsize>(block_size_));
  const auto got = static_cast<std::size_t>(in_.gcount());
  buffer_.resize(old + got);
  peak_buffer_ = std::max(peak_buffer_, buffer_.capacity());
  if (got < block_size_) eof_ = true;
  return got > 0;
}

SplitItem ChunkSplitter::take(std::size_t length) {
  SplitItem item;
  item.chunk.source_file = source_file_;
  item.chunk.byte_offset = buffer_offset_;
  item.chunk.xml_text.assign(buffer_, 0, length);
  buffer_.erase(0, length);
  buffer_offset_ += length;
  scan_from_ = 0;

  const std::string_view text = item.chunk.xml_text;
  if (text.substr(0, kDeclaration.size()) != kDeclaration) {
    item.status = ChunkStatus::Stray;
  } else {
    item.status = closes_root(text) ? ChunkStatus::Complete : ChunkStatus::Truncated;
  }
  return item;
}

std::optional<SplitItem> ChunkSplitter::next() {
  while (true) {
    // The boundary newline belongs to the preceding chunk, so the very first
    // declaration of a file is never matched here.
    const auto hit = buffer_.find(kBoundary, scan_from_);
    if (hit != std::string::npos) return take(hit + 1);
    if (buffer_.size() >= kBoundary.size()) scan_from_ = buffer_.size() - kBoundary.size() + 1;
    if (!fill()) {
      if (buffer_.empty()) return std::nullopt;
      return take(buffer_.size());
    }
  }
}

std::vector<SplitItem> split_concatenated_xml(std::istream& in, const std::string& source_file) {
  ChunkSplitter splitter(in, source_file);
  std::vector<SplitItem> out;
  while (auto item = splitter.next()) out.push_back(std::move(*item));
  return out;
}

std::string root_element_name(std::string_view xml_text) {
  std::size_t pos = 0;
  while (true) {
    pos = xml_text.find('<', pos);
    if (pos == std::string_view::npos || pos + 1 >= xml_text.size()) return {};
    const char c = xml_text[pos + 1];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') break;
    if (xml_text.substr(pos, 4) == "<!--") {
      pos = xml_text.find("-->", pos);
      if (pos == std::string_view::npos) return {};
    } else if (xml_text.substr(pos, 9) == "<!DOCTYPE") {
      // skip the internal subset so declarations inside it are not mistaken for the root
      int depth = 0;
      for (++pos; pos < xml_text.size(); ++pos) {
        if (xml_text[pos] == '[') ++depth;
        else if (xml_text[pos] == ']') --depth;
        else if (xml_text[pos] == '>' && depth <= 0) break;
      }
    } else {
      ++pos;
    }
  }
  const auto start = pos + 1;
  auto end = start;
  while (end < xml_text.size()) {
    const char c = xml_text[end];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/') break;
    ++end;
  }
  if (end >= xml_text.size()) return {};
  return std::string(xml_text.substr(start, end - start));
}

bool closes_root(std::string_view xml_text) {
  const std::string root = root_element_name(xml_text);
  if (root.empty()) return false;
  auto end = xml_text.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(xml_text[end - 1]))) --end;
  const std::string_view body = xml_text.substr(0, end);
  if (body.ends_with("/>")) {
    // self-closing root: <root .../>
    const auto open = body.find("<" + root);
    return open != std::string_view::npos && body.find('>', open) == body.size() - 1;
  }
  const std::string closing = "</" + root;
  if (!body.ends_with(">")) return false;
  const auto at = body.rfind(closing);
  if (at == std::string_view::npos) return false;
  for (auto i = at + closing.size(); i + 1 < body.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(body[i]))) return false;
  }
  return true;
}

}  // namespace patentlens::ingest
