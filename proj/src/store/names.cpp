#include "patentlens/store/names.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "patentlens/error.hpp"

namespace patentlens::store {

const char* to_string(EntityKind kind) { return kind == EntityKind::Inventor ? "inventor" : "organisation"; }

namespace {

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_suffix(std::string_view token) {
  return std::find(std::begin(kLegalSuffixes), std::end(kLegalSuffixes), token) != std::end(kLegalSuffixes);
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string upper;
  upper.reserve(raw.size());
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    upper.push_back(u < 0x80 && std::isspace(u) ? ' ' : static_cast<char>(u < 0x80 ? std::toupper(u) : u));
  }
  auto tokens = split_tokens(upper);
  while (tokens.size() > 1 && is_suffix(tokens.back())) tokens.pop_back();
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string slugify(std::string_view text) {
  std::string out;
  bool hyphen = false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      if (hyphen && !out.empty()) out.push_back('-');
      hyphen = false;
      out.push_back(static_cast<char>(std::tolower(u)));
    } else {
      hyphen = true;
    }
  }
  return out;
}

bool is_valid_canonical_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

void AliasTable::add(std::string_view match, const std::string& canonical_id, const std::string& display,
                     AliasProvenance provenance) {
  if (!is_valid_canonical_id(canonical_id)) fail(Errc::invalid_argument, "invalid canonical id: " + canonical_id);
  auto bind = [&](const std::string& normalized) {
    if (normalized.empty()) fail(Errc::invalid_argument, "alias match normalizes to nothing");
    const auto it = by_match_.find(normalized);
    if (it != by_match_.end()) {
      if (it->second.canonical_id != canonical_id) {
        fail(Errc::invalid_argument, "alias '" + normalized + "' bound to both " + it->second.canonical_id +
                                         " and " + canonical_id);
      }
      return;
    }
    by_match_.emplace(normalized, AliasEntry{canonical_id, display, provenance});
  };
  bind(normalize_name(match));
  bind(normalize_name(display));
  by_id_.try_emplace(canonical_id, AliasEntry{canonical_id, display, provenance});
}

const AliasEntry* AliasTable::lookup(std::string_view normalized) const {
  const auto it = by_match_.find(normalized);
  return it == by_match_.end() ? nullptr : &it->second;
}

const AliasEntry* AliasTable::entry_for(std::string_view canonical_id) const {
  const auto it = by_id_.find(canonical_id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::vector<std::string> AliasTable::canonical_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : by_id_) out.push_back(id);
  return out;
}

AliasTable AliasTable::from_json(const nlohmann::json& j) {
  AliasTable table;
  if (!j.is_object() || !j.contains("aliases") || !j["aliases"].is_array()) {
    fail(Errc::invalid_argument, "alias table must be {\"aliases\": [...]}");
  }
  for (const auto& e : j["aliases"]) {
    if (!e.is_object() || !e.contains("match") || !e.contains("canonical_id")) {
      fail(Errc::invalid_argument, "alias entry needs match and canonical_id");
    }
    const auto id = e["canonical_id"].get<std::string>();
    const auto display = e.value("display", id);
    table.add(e["match"].get<std::string>(), id, display, AliasProvenance::Manual);
  }
  return table;
}

AliasTable AliasTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot read alias table: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, "alias table is not valid JSON: " + std::string(e.what()));
  }
}

CanonicalName canonicalize_name(std::string_view raw, const AliasTable& aliases, EntityKind kind) {
  const std::string normalized = normalize_name(raw);
  const std::string slug = slugify(normalized);
  if (slug.empty()) fail(Errc::invalid_argument, "unnameable entity");
  if (kind == EntityKind::Organisation) {
    if (const auto* hit = aliases.lookup(normalized)) {
      return {{kind, hit->canonical_id}, hit->display, hit->provenance};
    }
  }
  return {{kind, slug}, normalized, AliasProvenance::RuleDerived};
}

}  // namespace patentlens::store
