#include "patentlens/ingest/parser.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

#include "patentlens/ingest/xml.hpp"

namespace patentlens::ingest {

namespace {

[[noreturn]] void reject(const char* reason) { fail(Errc::invalid_argument, reason); }

std::string child_text(const XmlNode* node, std::string_view name) {
  if (!node) return {};
  const XmlNode* c = node->find(name);
  return c ? c->text_content() : std::string{};
}

Date required_date(const std::string& text) {
  if (text.empty()) reject("missing required field");
  auto d = Date::parse(text);
  if (!d) reject("invalid date");
  return *d;
}

PersonName person_of(const XmlNode& party) {
  PersonName p;
  p.first = child_text(&party, "first-name");
  p.last = child_text(&party, "last-name");
  return p;
}

std::vector<PersonName> inventors_of(const XmlNode& biblio) {
  std::vector<PersonName> out;
  std::vector<const XmlNode*> nodes;
  if (const auto* inv = biblio.find("inventors")) inv->find_all("inventor", nodes);
  if (nodes.empty()) {
    // 2005-2012 vintages list inventors as applicants
    std::vector<const XmlNode*> applicants;
    biblio.find_all("applicant", applicants);
    biblio.find_all("us-applicant", applicants);
    for (const auto* a : applicants) {
      if (a->attribute("app-type") == "applicant-inventor") nodes.push_back(a);
    }
  }
  for (const auto* n : nodes) {
    PersonName p = person_of(*n);
    if (!p.first.empty() || !p.last.empty()) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> assignees_of(const XmlNode& biblio) {
  std::vector<std::string> out;
  const auto* block = biblio.find("assignees");
  if (!block) return out;
  std::vector<const XmlNode*> nodes;
  block->find_all("assignee", nodes);
  for (const auto* n : nodes) {
    std::string name = child_text(n, "orgname");
    if (name.empty()) name = person_of(*n).display();
    if (!name.empty()) out.push_back(std::move(name));
  }
  return out;
}

std::vector<std::string> cpc_codes_of(const XmlNode& biblio) {
  std::vector<std::string> out;
  const auto* block = biblio.find("classifications-cpc");
  if (!block) return out;
  std::vector<const XmlNode*> nodes;
  block->find_all("classification-cpc", nodes);
  std::unordered_set<std::string> seen;
  for (const auto* n : nodes) {
    std::string code = child_text(n, "section") + child_text(n, "class") + child_text(n, "subclass") +
                       child_text(n, "main-group");
    std::erase_if(code, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (code.empty()) continue;
    if (seen.insert(code).second) out.push_back(std::move(code));
  }
  return out;
}

std::uint32_t citation_count(const XmlNode& biblio) {
  const XmlNode* block = biblio.find("us-references-cited");
  if (!block) block = biblio.find("references-cited");
  if (!block) return 0;
  std::uint32_t n = 0;
  for (const auto& c : block->children) {
    if (c.name == "us-citation" || c.name == "citation") ++n;
  }
  return n;
}

std::vector<Claim> claims_of(const XmlNode& root) {
  std::vector<Claim> out;
  const auto* block = root.child("claims");
  if (!block) return out;
  for (const auto& c : block->children) {
    if (c.name != "claim") continue;
    Claim claim;
    const auto num = c.attribute("num");
    int value = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    claim.number = (ec == std::errc{} && ptr == num.data() + num.size() && value > 0)
                       ? value
                       : static_cast<int>(out.size()) + 1;
    claim.text = c.text_content();
    claim.is_independent = is_independent_claim(claim.text);
    out.push_back(std::move(claim));
  }
  return out;
}

PatentDocument build(const XmlNode& root) {
  PatentDocument doc;
  const XmlNode* biblio = nullptr;
  if (root.name == "us-patent-grant") {
    doc.doc_kind = DocKind::Grant;
    biblio = root.child("us-bibliographic-data-grant");
  } else if (root.name == "us-patent-application") {
    doc.doc_kind = DocKind::Application;
    biblio = root.child("us-bibliographic-data-application");
  } else {
    reject("unsupported document type");
  }
  if (!biblio) reject("missing required field");

  const XmlNode* pub = biblio->find("publication-reference");
  const XmlNode* app = biblio->find("application-reference");
  if (!pub || !app) reject("missing required field");

  doc.doc_number = normalize_doc_number(child_text(pub, "doc-number"));
  if (doc.doc_number.empty()) reject("missing required field");
  doc.kind_code = child_text(pub, "kind");
  doc.filing_date = required_date(child_text(app, "date"));

  std::string pub_date = child_text(pub, "date");
  if (pub_date.empty()) pub_date = std::string(root.attribute("date-publ"));
  doc.publication_date = required_date(pub_date);
  if (doc.doc_kind == DocKind::Grant) {
    doc.grant_date = doc.publication_date;
    if (*doc.grant_date < doc.filing_date) reject("invalid date ordering");
  }

  doc.title = child_text(biblio, "invention-title");
  if (const auto* n = root.child("abstract")) doc.abstract_text = n->text_content();
  if (const auto* n = root.child("description")) doc.description_text = n->text_content();
  doc.claims = claims_of(root);
  doc.inventors = inventors_of(*biblio);
  doc.assignees = assignees_of(*biblio);
  doc.cpc_codes = cpc_codes_of(*biblio);
  doc.backward_citation_count = citation_count(*biblio);
  validate(doc);
  return doc;
}

}  // namespace

PatentDocument parse_patent_document(const RawDocumentChunk& chunk) {
  try {
    const std::string text = sanitize_utf8(chunk.xml_text);
    const auto root_name = root_element_name(text);
    if (!root_name.empty() && root_name != "us-patent-grant" && root_name != "us-patent-application") {
      reject("unsupported document type");
    }
    return build(parse_xml(text));
  } catch (const DocumentError&) {
    throw;
  } catch (const Error& e) {
    throw DocumentError(e.what(), chunk.source_file, chunk.byte_offset);
  }
}

}  // namespace patentlens::ingest
