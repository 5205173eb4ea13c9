#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace patentlens::ingest {

struct RawDocumentChunk {
  std::string source_file;
  std::uint64_t byte_offset = 0;
  std::string xml_text;
};

enum class ChunkStatus {
  Complete,   ///< starts with "<?xml" and closes its root element
  Truncated,  ///< starts with "<?xml" but the root element is never closed
  Stray,      ///< bytes before the first declaration
};

struct SplitItem {
  RawDocumentChunk chunk;
  ChunkStatus status = ChunkStatus::Complete;
};

/// Streams a bulk file of concatenated standalone XML documents. Documents are
/// delimited by "<?xml" at the start of a line. Only the current document plus
/// one read block is buffered.
class ChunkSplitter {
 public:
  ChunkSplitter(std::istream& in, std::string source_file, std::size_t block_size = 1 << 16);

  std::optional<SplitItem> next();

  /// High-water mark of the internal buffer capacity, in bytes.
  std::size_t peak_buffer_bytes() const { return peak_buffer_; }

 private:
  bool fill();
  SplitItem take(std::size_t length);

  std::istream& in_;
  std::string source_file_;
  std::size_t block_size_;
  std::string buffer_;
  std::uint64_t buffer_offset_ = 0;
  std::size_t scan_from_ = 0;
  std::size_t peak_buffer_ = 0;
  bool eof_ = false;
};

std::vector<SplitItem> split_concatenated_xml(std::istream& in, const std::string& source_file);

/// Name of the first element after the prolog, or empty when there is none.
std::string root_element_name(std::string_view xml_text);

/// True when the text, ignoring trailing whitespace, ends with the closing tag
/// of its root element.
bool closes_root(std::string_view xml_text);

}  // namespace patentlens::ingest
