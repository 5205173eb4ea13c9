#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "patentlens/document.hpp"

namespace patentlens::ingest {

struct QuarantineRecord {
  std::string source_file;
  std::uint64_t byte_offset = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t files_processed = 0;
  std::size_t documents_parsed = 0;
  std::size_t documents_quarantined = 0;
  std::vector<QuarantineRecord> quarantine_records;
};

/// Receives each parsed document once. A sink that throws patentlens::Error
/// rejects the document, which is then quarantined with the error message.
using DocumentSink = std::function<void(PatentDocument)>;

struct IngestOptions {
  /// Files are parsed concurrently, one worker per file; sink calls are
  /// serialized regardless.
  unsigned workers = 1;
};

/// `input` is a single file or a directory scanned non-recursively for
/// *.xml files in lexicographic filename order. Throws Error(io) when the
/// path cannot be read; per-document failures are quarantined.
IngestReport ingest_path(const std::filesystem::path& input, const DocumentSink& sink,
                         const IngestOptions& options = {});

/// Same as ingest_path for one already-open stream.
IngestReport ingest_stream(std::istream& in, const std::string& source_file, const DocumentSink& sink);

std::vector<std::filesystem::path> list_input_files(const std::filesystem::path& input);

}  // namespace patentlens::ingest
