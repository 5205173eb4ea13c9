#include "patentlens/json_io.hpp"

#include "patentlens/error.hpp"

namespace patentlens {

namespace {

Date date_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) fail(Errc::invalid_argument, std::string("missing field ") + key);
  auto d = Date::parse(j[key].get<std::string>());
  if (!d) fail(Errc::invalid_argument, "invalid date");
  return *d;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return j[key].get<T>();
}

}  // namespace

json to_json(const PatentDocument& doc) {
  json claims = json::array();
  for (const auto& c : doc.claims) {
    claims.push_back({{"number", c.number}, {"text", c.text}, {"is_independent", c.is_independent}});
  }
  json inventors = json::array();
  for (const auto& p : doc.inventors) inventors.push_back({{"first", p.first}, {"last", p.last}});

  json j;
  j["doc_number"] = doc.doc_number;
  j["doc_kind"] = to_string(doc.doc_kind);
  j["kind_code"] = doc.kind_code;
  j["title"] = doc.title;
  j["abstract_text"] = doc.abstract_text;
  j["claims"] = std::move(claims);
  j["description_text"] = doc.description_text;
  j["filing_date"] = doc.filing_date.iso();
  j["publication_date"] = doc.publication_date.iso();
  if (doc.grant_date) j["grant_date"] = doc.grant_date->iso();
  j["inventors"] = std::move(inventors);
  j["assignees"] = doc.assignees;
  j["cpc_codes"] = doc.cpc_codes;
  j["backward_citation_count"] = doc.backward_citation_count;
  return j;
}

PatentDocument document_from_json(const json& j) {
  if (!j.is_object()) fail(Errc::invalid_argument, "document must be a JSON object");
  try {
    PatentDocument doc;
    doc.doc_number = get_or<std::string>(j, "doc_number", "");
    const auto kind = parse_doc_kind(get_or<std::string>(j, "doc_kind", ""));
    if (!kind) fail(Errc::invalid_argument, "invalid doc_kind");
    doc.doc_kind = *kind;
    doc.kind_code = get_or<std::string>(j, "kind_code", "");
    doc.title = get_or<std::string>(j, "title", "");
    doc.abstract_text = get_or<std::string>(j, "abstract_text", "");
    doc.description_text = get_or<std::string>(j, "description_text", "");
    doc.filing_date = date_field(j, "filing_date");
    doc.publication_date = date_field(j, "publication_date");
    if (j.contains("grant_date")) doc.grant_date = date_field(j, "grant_date");
    for (const auto& c : get_or<json>(j, "claims", json::array())) {
      doc.claims.push_back({c.at("number").get<int>(), c.at("text").get<std::string>(),
                            c.at("is_independent").get<bool>()});
    }
    for (const auto& p : get_or<json>(j, "inventors", json::array())) {
      doc.inventors.push_back({get_or<std::string>(p, "first", ""), get_or<std::string>(p, "last", "")});
    }
    doc.assignees = get_or<std::vector<std::string>>(j, "assignees", {});
    doc.cpc_codes = get_or<std::vector<std::string>>(j, "cpc_codes", {});
    doc.backward_citation_count = get_or<std::uint32_t>(j, "backward_citation_count", 0);
    return doc;
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed document JSON: ") + e.what());
  }
}

json to_json(const ingest::QuarantineRecord& record) {
  return {{"source_file", record.source_file}, {"byte_offset", record.byte_offset}, {"reason", record.reason}};
}

json to_json(const ingest::IngestReport& report) {
  json records = json::array();
  for (const auto& r : report.quarantine_records) records.push_back(to_json(r));
  return {{"files_processed", report.files_processed},
          {"documents_parsed", report.documents_parsed},
          {"documents_quarantined", report.documents_quarantined},
          {"quarantine_records", std::move(records)}};
}

}  // namespace patentlens
