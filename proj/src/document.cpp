#include "patentlens/document.hpp"

#include <cctype>
#include <set>

#include "patentlens/error.hpp"

namespace patentlens {

const char* to_string(DocKind kind) {
  return kind == DocKind::Grant ? "Grant" : "Application";
}

std::optional<DocKind> parse_doc_kind(std::string_view text) {
  if (text == "Grant" || text == "grant") return DocKind::Grant;
  if (text == "Application" || text == "application") return DocKind::Application;
  return std::nullopt;
}

std::string PersonName::display() const {
  if (first.empty()) return last;
  if (last.empty()) return first;
  return first + " " + last;
}

std::string normalize_doc_number(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (out.empty() && c == '0') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_independent_claim(std::string_view text) {
  const std::string_view head = text.substr(0, std::min<std::size_t>(text.size(), 200));
  for (std::size_t i = 0; i + 5 < head.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < 5; ++k) {
      if (std::tolower(static_cast<unsigned char>(head[i + k])) != "claim"[k]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    // "claim 1", "claims 1-3", "claim1"
    std::size_t j = i + 5;
    if (j < head.size() && (head[j] == 's' || head[j] == 'S')) ++j;
    while (j < head.size() && head[j] == ' ') ++j;
    if (j < head.size() && std::isdigit(static_cast<unsigned char>(head[j]))) return false;
  }
  return true;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

void validate(const PatentDocument& doc) {
  if (doc.doc_number.empty()) fail(Errc::invalid_argument, "missing required field");
  if (doc.doc_kind == DocKind::Grant) {
    if (!doc.grant_date) fail(Errc::invalid_argument, "missing grant date");
    if (doc.claims.empty()) fail(Errc::invalid_argument, "grant without claims");
  }
  if (doc.grant_date && *doc.grant_date < doc.filing_date) {
    fail(Errc::invalid_argument, "invalid date ordering");
  }
  std::set<int> numbers;
  for (const auto& c : doc.claims) {
    if (c.number <= 0) fail(Errc::invalid_argument, "invalid claim number");
    if (!numbers.insert(c.number).second) fail(Errc::invalid_argument, "duplicate claim number");
  }
}

std::optional<std::int64_t> grant_lag_days(const PatentDocument& doc) {
  if (!doc.grant_date) return std::nullopt;
  return days_between(doc.filing_date, *doc.grant_date);
}

}  // namespace patentlens
