#include "patentlens/store/patent_store.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <shared_mutex>

#include "patentlens/error.hpp"
#include "patentlens/json_io.hpp"

namespace fs = std::filesystem;

namespace patentlens::store {

char cpc_section_of(std::string_view code) {
  if (code.empty()) return 0;
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(code.front())));
  return (c >= 'A' && c <= 'Z') ? c : 0;
}

namespace {

struct Key {
  std::string doc_number;
  DocKind kind;

  friend auto operator<=>(const Key&, const Key&) = default;
};

struct Entry {
  PatentDocument doc;
  std::vector<std::pair<EntityKey, std::string>> inventors;  // key, raw display
  std::vector<std::pair<EntityKey, std::string>> orgs;
};

std::string record_id(const Key& k) {
  return std::string(k.kind == DocKind::Grant ? "grant/" : "application/") + k.doc_number;
}

// Application sorts before Grant when filing date and number tie.
bool query_order(const PatentDocument* a, const PatentDocument* b) {
  if (a->filing_date != b->filing_date) return a->filing_date > b->filing_date;
  if (a->doc_number != b->doc_number) return a->doc_number < b->doc_number;
  return a->doc_kind == DocKind::Application && b->doc_kind == DocKind::Grant;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

std::string header_bytes() {
  std::string h(PatentStore::kMagic);
  h.push_back(static_cast<char>(PatentStore::kVersion));
  h.push_back('\n');
  return h;
}

void write_record(std::ostream& out, const PatentDocument& doc) {
  const std::string payload = to_json(doc).dump();
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

}  // namespace

struct PatentStore::Impl {
  AliasTable aliases;
  fs::path path;
  std::ofstream log;
  mutable std::shared_mutex mutex;
  std::map<Key, Entry> records;
  std::map<EntityKey, std::set<Key>> links;

  Entry link(PatentDocument doc) const {
    Entry e;
    auto add = [&](auto& list, std::string_view raw, EntityKind kind) {
      try {
        auto name = canonicalize_name(raw, aliases, kind);
        for (const auto& [k, _] : list) {
          if (k == name.key) return;
        }
        list.emplace_back(std::move(name.key), std::string(raw));
      } catch (const Error&) {
        // unnameable party; the document is kept without this link
      }
    };
    for (const auto& p : doc.inventors) add(e.inventors, p.display(), EntityKind::Inventor);
    for (const auto& a : doc.assignees) add(e.orgs, a, EntityKind::Organisation);
    e.doc = std::move(doc);
    return e;
  }

  void unlink(const Key& key, const Entry& e) {
    auto drop = [&](const EntityKey& ek) {
      auto it = links.find(ek);
      if (it == links.end()) return;
      it->second.erase(key);
      if (it->second.empty()) links.erase(it);
    };
    for (const auto& [k, _] : e.inventors) drop(k);
    for (const auto& [k, _] : e.orgs) drop(k);
  }

  // Returns false when an identical record was already present.
  bool apply(PatentDocument doc) {
    Key key{doc.doc_number, doc.doc_kind};
    auto it = records.find(key);
    if (it != records.end()) {
      if (it->second.doc == doc) return false;
      unlink(key, it->second);
      records.erase(it);
    }
    Entry e = link(std::move(doc));
    for (const auto& [k, _] : e.inventors) links[k].insert(key);
    for (const auto& [k, _] : e.orgs) links[k].insert(key);
    records.emplace(std::move(key), std::move(e));
    return true;
  }

  bool known(const EntityKey& key) const {
    if (links.count(key)) return true;
    return key.kind == EntityKind::Organisation && aliases.entry_for(key.canonical_id) != nullptr;
  }

  void replay() {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open store: " + path.string());
    const std::string expected = header_bytes();
    std::string header(expected.size(), '\0');
    in.read(header.data(), static_cast<std::streamsize>(header.size()));
    if (in.gcount() == 0) {
      in.close();
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << expected;
      if (!out) fail(Errc::io, "cannot write store: " + path.string());
      return;
    }
    if (header.compare(0, kMagic.size(), kMagic) != 0) fail(Errc::io, "not a patent store: " + path.string());
    if (static_cast<unsigned char>(header[kMagic.size()]) != kVersion) {
      fail(Errc::io, "unsupported store version in " + path.string());
    }
    std::uint64_t good = expected.size();
    std::string payload;
    while (true) {
      std::array<unsigned char, 4> len{};
      in.read(reinterpret_cast<char*>(len.data()), 4);
      if (in.gcount() == 0) break;
      if (in.gcount() < 4) break;
      const std::uint32_t n = len[0] | (len[1] << 8) | (len[2] << 16) | (static_cast<std::uint32_t>(len[3]) << 24);
      payload.resize(n);
      in.read(payload.data(), n);
      if (static_cast<std::uint32_t>(in.gcount()) < n) break;
      try {
        PatentDocument doc = document_from_json(json::parse(payload));
        validate(doc);
        apply(std::move(doc));
      } catch (const std::exception& e) {
        fail(Errc::io, "corrupt store record at byte " + std::to_string(good) + ": " + e.what());
      }
      good += 4 + n;
    }
    in.close();
    if (fs::file_size(path) != good) fs::resize_file(path, good);
  }

  void open_log() {
    log.open(path, std::ios::binary | std::ios::app);
    if (!log) fail(Errc::io, "cannot append to store: " + path.string());
  }
};

PatentStore::PatentStore(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
PatentStore::PatentStore(PatentStore&&) noexcept = default;
PatentStore& PatentStore::operator=(PatentStore&&) noexcept = default;
PatentStore::~PatentStore() = default;

PatentStore PatentStore::open(const fs::path& path, AliasTable aliases) {
  auto impl = std::make_unique<Impl>();
  impl->aliases = std::move(aliases);
  impl->path = path;
  if (!fs::exists(path)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot create store: " + path.string());
    out << header_bytes();
  } else {
    impl->replay();
  }
  impl->open_log();
  return PatentStore(std::move(impl));
}

PatentStore PatentStore::in_memory(AliasTable aliases) {
  auto impl = std::make_unique<Impl>();
  impl->aliases = std::move(aliases);
  return PatentStore(std::move(impl));
}

std::string PatentStore::upsert(PatentDocument doc) {
  validate(doc);
  if (auto lag = grant_lag_days(doc); lag && *lag < 0) fail(Errc::internal, "negative grant lag reached the store");
  const Key key{doc.doc_number, doc.doc_kind};
  std::unique_lock lock(impl_->mutex);
  auto it = impl_->records.find(key);
  if (it != impl_->records.end() && it->second.doc == doc) return record_id(key);
  if (impl_->log.is_open()) {
    write_record(impl_->log, doc);
    impl_->log.flush();
    if (!impl_->log) fail(Errc::io, "store write failed: " + impl_->path.string());
  }
  impl_->apply(std::move(doc));
  return record_id(key);
}

std::size_t PatentStore::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->records.size();
}

std::optional<PatentDocument> PatentStore::get(std::string_view doc_number, DocKind kind) const {
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->records.find(Key{std::string(doc_number), kind});
  if (it == impl_->records.end()) return std::nullopt;
  return it->second.doc;
}

std::vector<PatentDocument> PatentStore::find_by_number(std::string_view doc_number) const {
  std::vector<PatentDocument> out;
  const std::string normalized = normalize_doc_number(doc_number);
  for (auto kind : {DocKind::Application, DocKind::Grant}) {
    if (auto d = get(normalized, kind)) out.push_back(std::move(*d));
  }
  return out;
}

std::vector<PatentDocument> PatentStore::documents() const {
  std::shared_lock lock(impl_->mutex);
  std::vector<PatentDocument> out;
  out.reserve(impl_->records.size());
  for (const auto& [_, e] : impl_->records) out.push_back(e.doc);
  return out;
}

QueryPage PatentStore::query(const PatentFilter& filter, const PageRequest& page) const {
  if (page.limit < 1 || page.limit > kMaxPageLimit) fail(Errc::invalid_argument, "limit must be in [1, 500]");
  if (filter.year_range && filter.year_range->first > filter.year_range->second) {
    fail(Errc::invalid_argument, "invalid range");
  }
  std::shared_lock lock(impl_->mutex);
  std::vector<const PatentDocument*> hits;
  auto consider = [&](const PatentDocument& d) {
    if (filter.doc_kind && d.doc_kind != *filter.doc_kind) return;
    if (filter.year_range) {
      const int y = d.filing_date.year();
      if (y < filter.year_range->first || y > filter.year_range->second) return;
    }
    if (filter.cpc_section) {
      const bool any = std::any_of(d.cpc_codes.begin(), d.cpc_codes.end(),
                                   [&](const std::string& c) { return cpc_section_of(c) == *filter.cpc_section; });
      if (!any) return;
    }
    hits.push_back(&d);
  };
  if (filter.entity) {
    if (!impl_->known(*filter.entity)) fail(Errc::not_found, "entity not found");
    if (auto it = impl_->links.find(*filter.entity); it != impl_->links.end()) {
      for (const auto& k : it->second) consider(impl_->records.at(k).doc);
    }
  } else {
    for (const auto& [_, e] : impl_->records) consider(e.doc);
  }
  std::sort(hits.begin(), hits.end(), query_order);
  QueryPage out;
  out.total = hits.size();
  for (std::size_t i = page.offset; i < hits.size() && out.items.size() < page.limit; ++i) {
    out.items.push_back(*hits[i]);
  }
  return out;
}

bool PatentStore::has_entity(const EntityKey& key) const {
  std::shared_lock lock(impl_->mutex);
  return impl_->known(key);
}

std::vector<EntityKey> PatentStore::entities(EntityKind kind) const {
  std::shared_lock lock(impl_->mutex);
  std::set<EntityKey> out;
  for (const auto& [k, _] : impl_->links) {
    if (k.kind == kind) out.insert(k);
  }
  if (kind == EntityKind::Organisation) {
    for (const auto& id : impl_->aliases.canonical_ids()) out.insert({kind, id});
  }
  return {out.begin(), out.end()};
}

std::vector<PatentDocument> PatentStore::linked_documents(const EntityKey& key) const {
  std::shared_lock lock(impl_->mutex);
  if (!impl_->known(key)) fail(Errc::not_found, "entity not found");
  std::vector<const PatentDocument*> hits;
  if (auto it = impl_->links.find(key); it != impl_->links.end()) {
    for (const auto& k : it->second) hits.push_back(&impl_->records.at(k).doc);
  }
  std::sort(hits.begin(), hits.end(), query_order);
  std::vector<PatentDocument> out;
  for (const auto* d : hits) out.push_back(*d);
  return out;
}

SummaryStats PatentStore::entity_summary(const EntityKey& key) const {
  std::shared_lock lock(impl_->mutex);
  const Impl& s = *impl_;
  if (!s.known(key)) fail(Errc::not_found, "entity not found");

  SummaryStats out;
  out.entity = key;

  // One group per doc_number; the linked grant represents the group when present.
  std::map<std::string, const Entry*> groups;
  std::string best_raw;
  if (auto it = s.links.find(key); it != s.links.end()) {
    for (const auto& k : it->second) {
      const Entry& e = s.records.at(k);
      auto& slot = groups[k.doc_number];
      if (!slot || e.doc.doc_kind == DocKind::Grant) slot = &e;
      for (const auto& list : {&e.inventors, &e.orgs}) {
        for (const auto& [ek, raw] : *list) {
          if (ek == key && (best_raw.empty() || raw < best_raw)) best_raw = raw;
        }
      }
    }
  }
  if (const auto* alias = key.kind == EntityKind::Organisation ? s.aliases.entry_for(key.canonical_id) : nullptr) {
    out.display_name = alias->display;
  } else {
    out.display_name = best_raw.empty() ? key.canonical_id : best_raw;
  }

  std::vector<double> lags;
  std::map<EntityKey, std::size_t> collaborators;
  for (const auto& [number, e] : groups) {
    const PatentDocument& d = e->doc;
    if (d.doc_kind == DocKind::Grant) {
      ++out.total_grants;
      ++out.per_year_grants[d.grant_date->year()];
      lags.push_back(static_cast<double>(*grant_lag_days(d)));
    } else if (!s.records.count(Key{number, DocKind::Grant})) {
      ++out.total_pending_applications;
    }
    ++out.per_year_filings[d.filing_date.year()];
    std::set<char> sections;
    for (const auto& c : d.cpc_codes) {
      if (char sec = cpc_section_of(c)) sections.insert(sec);
    }
    for (char sec : sections) ++out.cpc_section_histogram[sec];
    // inventors collaborate with co-inventors; organisations list their inventors
    for (const auto& [ek, _] : e->inventors) {
      if (ek != key) ++collaborators[ek];
    }
  }
  std::vector<std::pair<EntityKey, std::size_t>> ranked(collaborators.begin(), collaborators.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > 10) ranked.resize(10);
  out.top_collaborators = std::move(ranked);
  if (!lags.empty()) {
    std::sort(lags.begin(), lags.end());
    out.median_grant_lag_days = percentile_linear(lags, 0.5);
  }
  return out;
}

std::vector<GrantLagStats> PatentStore::grant_lag_aggregates(LagGrouping group_by) const {
  std::shared_lock lock(impl_->mutex);
  std::map<std::string, std::vector<double>> groups;
  for (const auto& [key, e] : impl_->records) {
    if (key.kind != DocKind::Grant) continue;
    const double lag = static_cast<double>(*grant_lag_days(e.doc));
    if (group_by == LagGrouping::FilingYear) {
      groups[std::to_string(e.doc.filing_date.year())].push_back(lag);
    } else {
      std::set<char> sections;
      for (const auto& c : e.doc.cpc_codes) {
        if (char sec = cpc_section_of(c)) sections.insert(sec);
      }
      for (char sec : sections) groups[std::string(1, sec)].push_back(lag);
    }
  }
  std::vector<GrantLagStats> out;
  for (auto& [k, lags] : groups) out.push_back(summarize_lags(k, std::move(lags)));
  return out;
}

const AliasTable& PatentStore::aliases() const { return impl_->aliases; }

void PatentStore::compact() {
  std::unique_lock lock(impl_->mutex);
  if (impl_->path.empty()) return;
  const fs::path tmp = impl_->path.string() + ".compact";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << header_bytes();
    for (const auto& [_, e] : impl_->records) write_record(out, e.doc);
    if (!out) fail(Errc::io, "compaction failed writing " + tmp.string());
  }
  impl_->log.close();
  fs::rename(tmp, impl_->path);
  impl_->open_log();
}

}  // namespace patentlens::store
