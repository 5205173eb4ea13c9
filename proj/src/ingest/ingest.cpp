#include "patentlens/ingest/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "patentlens/error.hpp"
#include "patentlens/ingest/parser.hpp"
#include "patentlens/ingest/splitter.hpp"

namespace fs = std::filesystem;

namespace patentlens::ingest {

namespace {

const char* reason_for(ChunkStatus status) {
  return status == ChunkStatus::Truncated ? "truncated document" : "no xml declaration";
}

}  // namespace

std::vector<fs::path> list_input_files(const fs::path& input) {
  std::error_code ec;
  const auto status = fs::status(input, ec);
  if (ec || !fs::exists(status)) fail(Errc::io, "cannot read input path: " + input.string());
  if (fs::is_regular_file(status)) {
    std::ifstream probe(input, std::ios::binary);
    if (!probe) fail(Errc::io, "cannot read input path: " + input.string());
    return {input};
  }
  if (!fs::is_directory(status)) fail(Errc::io, "unsupported input path: " + input.string());
  std::vector<fs::path> files;
  fs::directory_iterator it(input, ec);
  if (ec) fail(Errc::io, "cannot read input path: " + input.string());
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

IngestReport ingest_stream(std::istream& in, const std::string& source_file, const DocumentSink& sink) {
  IngestReport report;
  report.files_processed = 1;
  ChunkSplitter splitter(in, source_file);
  auto quarantine = [&](std::uint64_t offset, std::string reason) {
    ++report.documents_quarantined;
    report.quarantine_records.push_back({source_file, offset, std::move(reason)});
  };
  while (auto item = splitter.next()) {
    if (item->status != ChunkStatus::Complete) {
      quarantine(item->chunk.byte_offset, reason_for(item->status));
      continue;
    }
    try {
      PatentDocument doc = parse_patent_document(item->chunk);
      sink(std::move(doc));
      ++report.documents_parsed;
    } catch (const DocumentError& e) {
      quarantine(e.byte_offset(), e.reason());
    } catch (const Error& e) {
      if (e.code() == Errc::io || e.code() == Errc::internal) throw;
      quarantine(item->chunk.byte_offset, e.what());
    }
  }
  return report;
}

IngestReport ingest_path(const fs::path& input, const DocumentSink& sink, const IngestOptions& options) {
  const auto files = list_input_files(input);
  std::vector<IngestReport> per_file(files.size());

  std::mutex sink_mutex;
  const DocumentSink serialized = [&](PatentDocument doc) {
    std::lock_guard lock(sink_mutex);
    sink(std::move(doc));
  };

  auto run_file = [&](std::size_t i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) fail(Errc::io, "cannot read input file: " + files[i].string());
    per_file[i] = ingest_stream(in, files[i].string(), serialized);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(files.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) run_file(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < files.size(); i = next++) {
            try {
              run_file(i);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
            }
          }
        });
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  IngestReport total;
  for (auto& r : per_file) {
    total.files_processed += r.files_processed;
    total.documents_parsed += r.documents_parsed;
    total.documents_quarantined += r.documents_quarantined;
    std::move(r.quarantine_records.begin(), r.quarantine_records.end(),
              std::back_inserter(total.quarantine_records));
  }
  return total;
}

}  // namespace patentlens::ingest
