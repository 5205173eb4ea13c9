#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patentlens/document.hpp"
#include "patentlens/store/names.hpp"
#include "patentlens/store/stats.hpp"

namespace patentlens::store {

struct SummaryStats {
  EntityKey entity;
  std::string display_name;
  std::size_t total_grants = 0;
  std::size_t total_pending_applications = 0;
  std::map<int, std::size_t> per_year_filings;
  std::map<int, std::size_t> per_year_grants;
  std::map<char, std::size_t> cpc_section_histogram;
  std::vector<std::pair<EntityKey, std::size_t>> top_collaborators;  ///< at most 10
  std::optional<double> median_grant_lag_days;
};

struct PatentFilter {
  std::optional<DocKind> doc_kind;
  std::optional<EntityKey> entity;
  std::optional<char> cpc_section;
  std::optional<std::pair<int, int>> year_range;  ///< inclusive filing years
};

inline constexpr std::size_t kMaxPageLimit = 500;

struct PageRequest {
  std::size_t offset = 0;
  std::size_t limit = 50;
};

struct QueryPage {
  std::size_t total = 0;
  std::vector<PatentDocument> items;
};

enum class LagGrouping { FilingYear, CpcSection };

/// CPC section letter of a code ("G06F17" -> 'G'), or 0 when empty.
char cpc_section_of(std::string_view code);

/// Patent records keyed by (doc_number, doc_kind), with inventor and
/// organisation links resolved at upsert time.
///
/// File-backed stores use an append-only log ("PATSTORE" + version byte, then
/// length-prefixed JSON records); the index is rebuilt on open and the last
/// record for a key wins. Readers may run concurrently; writes are serialized.
class PatentStore {
 public:
  static constexpr std::string_view kMagic = "PATSTORE";
  static constexpr unsigned char kVersion = 1;

  /// Creates the file when missing. Throws Error(io) on unreadable or foreign
  /// files. A torn trailing record is dropped and the file truncated.
  static PatentStore open(const std::filesystem::path& path, AliasTable aliases = {});
  static PatentStore in_memory(AliasTable aliases = {});

  PatentStore(PatentStore&&) noexcept;
  PatentStore& operator=(PatentStore&&) noexcept;
  ~PatentStore();

  /// Validates, then inserts or replaces. Returns "<kind>/<doc_number>".
  /// Throws Error(invalid_argument) naming the violated invariant.
  std::string upsert(PatentDocument doc);

  std::size_t size() const;
  std::optional<PatentDocument> get(std::string_view doc_number, DocKind kind) const;
  std::vector<PatentDocument> find_by_number(std::string_view doc_number) const;

  /// Snapshot of every record in key order.
  std::vector<PatentDocument> documents() const;

  /// Ordered by filing_date descending, doc_number ascending, Application
  /// before Grant. Throws "entity not found" / "invalid range".
  QueryPage query(const PatentFilter& filter, const PageRequest& page) const;

  bool has_entity(const EntityKey& key) const;
  std::vector<EntityKey> entities(EntityKind kind) const;
  SummaryStats entity_summary(const EntityKey& key) const;

  /// Records linked to the entity, in query order.
  std::vector<PatentDocument> linked_documents(const EntityKey& key) const;

  /// One entry per non-empty group, ascending group key. A grant counts once
  /// in each distinct CPC section it carries.
  std::vector<GrantLagStats> grant_lag_aggregates(LagGrouping group_by) const;

  const AliasTable& aliases() const;

  /// Rewrites the log with one record per key.
  void compact();

 private:
  struct Impl;
  explicit PatentStore(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace patentlens::store
