#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patentlens/date.hpp"

namespace patentlens {

enum class DocKind { Grant, Application };

const char* to_string(DocKind kind);
std::optional<DocKind> parse_doc_kind(std::string_view text);

struct PersonName {
  std::string first;
  std::string last;

  /// "First Last", or whichever part is present.
  std::string display() const;

  friend bool operator==(const PersonName&, const PersonName&) = default;
};

struct Claim {
  int number = 0;
  std::string text;
  bool is_independent = true;

  friend bool operator==(const Claim&, const Claim&) = default;
};

struct PatentDocument {
  std::string doc_number;
  DocKind doc_kind = DocKind::Application;
  std::string kind_code;
  std::string title;
  std::string abstract_text;
  std::vector<Claim> claims;
  std::string description_text;
  Date filing_date;
  Date publication_date;
  std::optional<Date> grant_date;
  std::vector<PersonName> inventors;
  std::vector<std::string> assignees;
  std::vector<std::string> cpc_codes;
  std::uint32_t backward_citation_count = 0;

  friend bool operator==(const PatentDocument&, const PatentDocument&) = default;
};

/// Upper-cases, strips internal whitespace and leading zeros. "07654321" -> "7654321".
std::string normalize_doc_number(std::string_view raw);

/// Dependent iff "claim" followed by a digit occurs (case-insensitive) within
/// the first 200 characters of the claim text.
bool is_independent_claim(std::string_view text);

/// Collapses runs of whitespace into one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Throws Error(invalid_argument) naming the first violated invariant:
/// "missing required field", "invalid date ordering", "missing grant date",
/// "duplicate claim number", "grant without claims".
void validate(const PatentDocument& doc);

/// Grant lag in calendar days from filing to grant, when granted.
std::optional<std::int64_t> grant_lag_days(const PatentDocument& doc);

}  // namespace patentlens
