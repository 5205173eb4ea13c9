#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace patentlens::store {

enum class EntityKind { Inventor, Organisation };

const char* to_string(EntityKind kind);

struct EntityKey {
  EntityKind kind = EntityKind::Organisation;
  std::string canonical_id;  ///< [a-z0-9-]+

  friend auto operator<=>(const EntityKey&, const EntityKey&) = default;
};

enum class AliasProvenance { Manual, RuleDerived };

struct AliasEntry {
  std::string canonical_id;
  std::string display;
  AliasProvenance provenance = AliasProvenance::Manual;
};

/// Legal-form tokens dropped from the end of organisation names.
inline constexpr std::string_view kLegalSuffixes[] = {"INC",  "INCORPORATED", "CORP", "CORPORATION", "LLC",
                                                      "LTD",  "LIMITED",      "CO",   "COMPANY",     "GMBH",
                                                      "KK",   "AG",           "SA",   "PLC"};

/// Uppercase, strip ASCII punctuation, collapse whitespace, then drop trailing
/// legal suffixes until none remain. The last remaining token is never dropped.
std::string normalize_name(std::string_view raw);

/// Lowercase, runs of characters outside [a-z0-9] become a single hyphen.
std::string slugify(std::string_view text);

bool is_valid_canonical_id(std::string_view id);

/// Maps normalized raw names onto canonical ids. Each entry's display form is
/// registered as a match too, so canonicalizing a display string is stable.
class AliasTable {
 public:
  /// Throws Error(invalid_argument) when the match string normalizes to
  /// nothing, the id is not a slug, or the match is already bound elsewhere.
  void add(std::string_view match, const std::string& canonical_id, const std::string& display,
           AliasProvenance provenance = AliasProvenance::Manual);

  const AliasEntry* lookup(std::string_view normalized) const;
  const AliasEntry* entry_for(std::string_view canonical_id) const;

  /// Distinct canonical ids, ascending.
  std::vector<std::string> canonical_ids() const;
  std::size_t size() const { return by_match_.size(); }

  /// {"aliases": [{"match", "canonical_id", "display"}]}
  static AliasTable from_json(const nlohmann::json& j);
  static AliasTable load(const std::filesystem::path& path);

 private:
  std::map<std::string, AliasEntry, std::less<>> by_match_;
  std::map<std::string, AliasEntry, std::less<>> by_id_;
};

struct CanonicalName {
  EntityKey key;
  std::string display;
  AliasProvenance provenance = AliasProvenance::RuleDerived;
};

/// Throws Error(invalid_argument, "unnameable entity") when nothing nameable
/// survives normalization.
CanonicalName canonicalize_name(std::string_view raw, const AliasTable& aliases,
                                EntityKind kind = EntityKind::Organisation);

}  // namespace patentlens::store
