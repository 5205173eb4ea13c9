#pragma once

#include <cstdint>
#include <string>

#include "patentlens/document.hpp"
#include "patentlens/error.hpp"
#include "patentlens/ingest/splitter.hpp"

namespace patentlens::ingest {

/// A per-document failure. Carries the location so it can be quarantined.
class DocumentError : public Error {
 public:
  DocumentError(std::string reason, std::string source_file, std::uint64_t byte_offset)
      : Error(Errc::invalid_argument, reason),
        reason_(std::move(reason)),
        source_file_(std::move(source_file)),
        byte_offset_(byte_offset) {}

  const std::string& reason() const { return reason_; }
  const std::string& source_file() const { return source_file_; }
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::string reason_;
  std::string source_file_;
  std::uint64_t byte_offset_;
};

/// Parses a modern-vintage us-patent-grant / us-patent-application document.
/// Reasons: "unsupported document type", "missing required field",
/// "invalid date", "invalid date ordering", "truncated document",
/// "malformed xml", plus the invariant failures raised by validate().
PatentDocument parse_patent_document(const RawDocumentChunk& chunk);

}  // namespace patentlens::ingest
