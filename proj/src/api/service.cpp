#include "patentlens/api/service.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>

#include "patentlens/error.hpp"
#include "patentlens/json_io.hpp"

namespace patentlens::api {

const char* to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::invalid_payload: return "invalid_payload";
    case ApiErrorCode::entity_not_found: return "entity_not_found";
    case ApiErrorCode::no_model_loaded: return "no_model_loaded";
    case ApiErrorCode::schema_mismatch: return "schema_mismatch";
    case ApiErrorCode::internal: return "internal";
  }
  return "internal";
}

ApiResponse error_response(int status, ApiErrorCode code, std::string message) {
  return {status, {{"status", status}, {"code", to_string(code)}, {"message", std::move(message)}}};
}

namespace {

ApiResponse from_error(const Error& e) {
  switch (e.code()) {
    case Errc::invalid_argument:
    case Errc::insufficient_data:
    case Errc::numerical:
      return error_response(400, ApiErrorCode::invalid_payload, e.what());
    case Errc::not_found: return error_response(404, ApiErrorCode::entity_not_found, e.what());
    case Errc::schema_mismatch: return error_response(409, ApiErrorCode::schema_mismatch, e.what());
    case Errc::io:
    case Errc::internal: break;
  }
  return error_response(500, ApiErrorCode::internal, e.what());
}

ApiResponse no_model() { return error_response(503, ApiErrorCode::no_model_loaded, "no model bundle is loaded"); }

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::optional<std::string> param(const QueryParams& q, const std::string& key) {
  const auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

long long parse_int(const std::string& text, const char* what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(Errc::invalid_argument, std::string("invalid integer for ") + what);
  }
  return v;
}

std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    if (end > start) out.emplace_back(s.substr(start, end - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string string_field(const json& j, const char* key, bool required = false) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) fail(Errc::invalid_argument, std::string("missing field ") + key);
    return {};
  }
  if (!j[key].is_string()) fail(Errc::invalid_argument, std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) fail(Errc::invalid_argument, std::string(key) + " must be a list");
  for (const auto& v : j[key]) {
    if (!v.is_string()) fail(Errc::invalid_argument, std::string(key) + " must contain strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

PersonName person_from(const json& v) {
  if (v.is_object()) return {string_field(v, "first"), string_field(v, "last")};
  if (!v.is_string()) fail(Errc::invalid_argument, "inventors must be strings or {first,last} objects");
  const std::string name = normalize_whitespace(v.get<std::string>());
  const auto space = name.rfind(' ');
  if (space == std::string::npos) return {"", name};
  return {name.substr(0, space), name.substr(space + 1)};
}

json summary_row(const PatentDocument& d) {
  json row = {{"doc_number", d.doc_number},
              {"doc_kind", to_string(d.doc_kind)},
              {"title", d.title},
              {"filing_date", d.filing_date.iso()}};
  if (d.grant_date) {
    row["grant_date"] = d.grant_date->iso();
    row["actual_days"] = *grant_lag_days(d);
  }
  return row;
}

json brief(const PatentDocument& d) {
  json inventors = json::array();
  for (const auto& p : d.inventors) inventors.push_back(p.display());
  json j = {{"doc_number", d.doc_number},      {"doc_kind", to_string(d.doc_kind)},
            {"kind_code", d.kind_code},        {"title", d.title},
            {"filing_date", d.filing_date.iso()}, {"publication_date", d.publication_date.iso()},
            {"cpc_codes", d.cpc_codes},        {"inventors", std::move(inventors)},
            {"assignees", d.assignees}};
  if (d.grant_date) j["grant_date"] = d.grant_date->iso();
  return j;
}

}  // namespace

json to_json(const model::PredictionResult& r, const std::string& model_id) {
  return {{"point_days", r.point_days},
          {"interval_low_days", r.interval_low_days},
          {"interval_high_days", r.interval_high_days},
          {"confidence", round4(r.confidence)},
          {"band", model::to_string(r.band)},
          {"model_id", model_id}};
}

json to_json(const store::GrantLagStats& s) {
  return {{"group_key", s.group_key}, {"n", s.n},           {"mean_days", s.mean_days},
          {"median_days", s.median_days}, {"p10_days", s.p10_days}, {"p90_days", s.p90_days}};
}

PatentDocument inline_document(const json& j) {
  if (!j.is_object()) fail(Errc::invalid_argument, "document must be a JSON object");
  PatentDocument doc;
  doc.doc_number = "INLINE";
  doc.doc_kind = DocKind::Application;
  doc.title = string_field(j, "title");
  doc.abstract_text = string_field(j, "abstract_text");
  doc.description_text = string_field(j, "description_text");
  const auto filing = Date::parse(string_field(j, "filing_date", true));
  if (!filing) fail(Errc::invalid_argument, "invalid date");
  doc.filing_date = *filing;
  doc.publication_date = *filing;
  int number = 1;
  for (auto& text : string_list(j, "claims")) {
    Claim c;
    c.number = number++;
    c.text = normalize_whitespace(text);
    c.is_independent = is_independent_claim(c.text);
    doc.claims.push_back(std::move(c));
  }
  doc.cpc_codes = string_list(j, "cpc_codes");
  doc.assignees = string_list(j, "assignees");
  if (j.contains("inventors") && !j["inventors"].is_null()) {
    if (!j["inventors"].is_array()) fail(Errc::invalid_argument, "inventors must be a list");
    for (const auto& v : j["inventors"]) doc.inventors.push_back(person_from(v));
  }
  validate(doc);
  return doc;
}

ApiService::ApiService(std::shared_ptr<const store::PatentStore> store,
                       std::shared_ptr<const model::TrainedModelBundle> bundle)
    : store_(std::move(store)), bundle_(std::move(bundle)) {}

void ApiService::set_model(std::shared_ptr<const model::TrainedModelBundle> bundle) {
  std::lock_guard lock(model_mutex_);
  bundle_ = std::move(bundle);
}

std::shared_ptr<const model::TrainedModelBundle> ApiService::model() const {
  std::lock_guard lock(model_mutex_);
  return bundle_;
}

ApiResponse ApiService::predict(const json& request) const {
  const auto bundle = model();
  if (!bundle) return no_model();
  if (!request.is_object()) return error_response(400, ApiErrorCode::invalid_payload, "body must be a JSON object");
  const bool by_number = request.contains("doc_number");
  const bool inline_doc = request.contains("document");
  if (by_number == inline_doc) {
    return error_response(400, ApiErrorCode::invalid_payload, "provide exactly one of doc_number or document");
  }
  PatentDocument doc;
  if (by_number) {
    if (!request["doc_number"].is_string()) {
      return error_response(400, ApiErrorCode::invalid_payload, "doc_number must be a string");
    }
    auto found = store_->find_by_number(request["doc_number"].get<std::string>());
    if (found.empty()) return error_response(404, ApiErrorCode::entity_not_found, "patent not found");
    doc = std::move(found.front());  // the application record when both exist
  } else {
    doc = inline_document(request["document"]);
  }
  const auto fv = features::assemble_features(doc, bundle->schema);
  return {200, to_json(model::predict_grant_lag(*bundle, fv), bundle->model_id)};
}

ApiResponse ApiService::patents(const QueryParams& query) const {
  store::PatentFilter filter;
  if (auto kind = param(query, "doc_kind")) {
    filter.doc_kind = parse_doc_kind(*kind);
    if (!filter.doc_kind) fail(Errc::invalid_argument, "doc_kind must be Grant or Application");
  }
  if (auto entity = param(query, "entity")) {
    const auto colon = entity->find(':');
    if (colon == std::string::npos) fail(Errc::invalid_argument, "entity must be inventor:<id> or org:<id>");
    const auto kind = entity->substr(0, colon);
    if (kind == "inventor") {
      filter.entity = store::EntityKey{store::EntityKind::Inventor, entity->substr(colon + 1)};
    } else if (kind == "org") {
      filter.entity = store::EntityKey{store::EntityKind::Organisation, entity->substr(colon + 1)};
    } else {
      fail(Errc::invalid_argument, "entity must be inventor:<id> or org:<id>");
    }
  }
  if (auto sec = param(query, "cpc_section")) {
    if (sec->size() != 1) fail(Errc::invalid_argument, "cpc_section must be one letter");
    filter.cpc_section = static_cast<char>(std::toupper(static_cast<unsigned char>((*sec)[0])));
  }
  const auto from = param(query, "year_from");
  const auto to = param(query, "year_to");
  if (from || to) {
    filter.year_range = std::pair<int, int>{from ? static_cast<int>(parse_int(*from, "year_from")) : 0,
                                            to ? static_cast<int>(parse_int(*to, "year_to")) : 9999};
  }
  store::PageRequest page;
  if (auto v = param(query, "offset")) {
    const auto o = parse_int(*v, "offset");
    if (o < 0) fail(Errc::invalid_argument, "offset must be non-negative");
    page.offset = static_cast<std::size_t>(o);
  }
  if (auto v = param(query, "limit")) {
    const auto l = parse_int(*v, "limit");
    if (l < 1 || l > static_cast<long long>(store::kMaxPageLimit)) fail(Errc::invalid_argument, "limit must be in [1, 500]");
    page.limit = static_cast<std::size_t>(l);
  }
  const auto result = store_->query(filter, page);
  json items = json::array();
  for (const auto& d : result.items) items.push_back(brief(d));
  return {200, {{"total", result.total}, {"offset", page.offset}, {"limit", page.limit}, {"items", std::move(items)}}};
}

ApiResponse ApiService::patent(std::string_view doc_number) const {
  const auto found = store_->find_by_number(doc_number);
  if (found.empty()) return error_response(404, ApiErrorCode::entity_not_found, "patent not found");
  json records = json::array();
  for (const auto& d : found) records.push_back(patentlens::to_json(d));
  return {200, {{"doc_number", found.front().doc_number}, {"records", std::move(records)}}};
}

json ApiService::summary_json(const store::SummaryStats& s, const model::TrainedModelBundle* bundle) const {
  auto key_map = [](const auto& m) {
    json out = json::object();
    for (const auto& [k, v] : m) {
      if constexpr (std::is_same_v<std::decay_t<decltype(k)>, char>) {
        out[std::string(1, k)] = v;
      } else {
        out[std::to_string(k)] = v;
      }
    }
    return out;
  };
  json collaborators = json::array();
  for (const auto& [k, count] : s.top_collaborators) {
    collaborators.push_back({{"kind", store::to_string(k.kind)}, {"id", k.canonical_id}, {"count", count}});
  }
  json j = {{"entity", {{"kind", store::to_string(s.entity.kind)}, {"id", s.entity.canonical_id}}},
            {"display_name", s.display_name},
            {"total_grants", s.total_grants},
            {"total_pending_applications", s.total_pending_applications},
            {"per_year_filings", key_map(s.per_year_filings)},
            {"per_year_grants", key_map(s.per_year_grants)},
            {"cpc_section_histogram", key_map(s.cpc_section_histogram)},
            {"top_collaborators", std::move(collaborators)}};
  if (s.median_grant_lag_days) j["median_grant_lag_days"] = *s.median_grant_lag_days;

  json rows = json::array();
  for (const auto& d : store_->linked_documents(s.entity)) {
    json row = summary_row(d);
    if (bundle && d.doc_kind == DocKind::Grant) {
      const auto r = model::predict_grant_lag(*bundle, features::assemble_features(d, bundle->schema));
      row["predicted_days"] = r.point_days;
      row["interval_low_days"] = r.interval_low_days;
      row["interval_high_days"] = r.interval_high_days;
      row["confidence"] = round4(r.confidence);
      row["band"] = model::to_string(r.band);
    }
    rows.push_back(std::move(row));
  }
  j["patents"] = std::move(rows);
  return j;
}

ApiResponse ApiService::entity_summary(store::EntityKind kind, std::string_view id) const {
  const store::EntityKey key{kind, std::string(id)};
  const auto bundle = kind == store::EntityKind::Inventor ? model() : nullptr;
  return {200, summary_json(store_->entity_summary(key), bundle.get())};
}

ApiResponse ApiService::org_batch_summary(std::string_view ids) const {
  const auto list = split_csv(ids);
  if (list.empty()) return error_response(400, ApiErrorCode::invalid_payload, "ids must list at least one id");
  json out = json::array();
  for (const auto& id : list) {
    const store::EntityKey key{store::EntityKind::Organisation, id};
    if (!store_->has_entity(key)) {
      out.push_back({{"id", id}, {"error", error_response(404, ApiErrorCode::entity_not_found, "entity not found").body}});
    } else {
      out.push_back({{"id", id}, {"summary", summary_json(store_->entity_summary(key), nullptr)}});
    }
  }
  return {200, std::move(out)};
}

ApiResponse ApiService::grant_lag_stats(const QueryParams& query) const {
  const auto group_by = param(query, "group_by");
  store::LagGrouping grouping;
  if (group_by == "filing_year") {
    grouping = store::LagGrouping::FilingYear;
  } else if (group_by == "cpc_section") {
    grouping = store::LagGrouping::CpcSection;
  } else {
    return error_response(400, ApiErrorCode::invalid_payload, "group_by must be filing_year or cpc_section");
  }
  json out = json::array();
  for (const auto& s : store_->grant_lag_aggregates(grouping)) out.push_back(to_json(s));
  return {200, std::move(out)};
}

ApiResponse ApiService::model_info() const {
  const auto bundle = model();
  if (!bundle) return no_model();
  return {200,
          {{"model_id", bundle->model_id},
           {"schema_id", bundle->schema.schema_id},
           {"learner", model::learner_name(bundle->point_model)},
           {"metrics", model::to_json(bundle->metrics)},
           {"trained_at", bundle->trained_at}}};
}

ApiResponse ApiService::load_model(const json& request) {
  if (!request.is_object() || !request.contains("path") || !request["path"].is_string()) {
    return error_response(400, ApiErrorCode::invalid_payload, "body must be {\"path\": string}");
  }
  try {
    auto bundle = std::make_shared<const model::TrainedModelBundle>(model::load_bundle(request["path"].get<std::string>()));
    set_model(std::move(bundle));
  } catch (const Error& e) {
    if (e.code() == Errc::schema_mismatch) return from_error(e);
    return error_response(400, ApiErrorCode::invalid_payload, e.what());
  }
  return model_info();
}

ApiResponse ApiService::handle(std::string_view method, std::string_view path, const QueryParams& query,
                               std::string_view body) {
  try {
    auto parse_body = [&]() -> json {
      try {
        return json::parse(body);
      } catch (const json::exception&) {
        fail(Errc::invalid_argument, "body is not valid JSON");
      }
    };
    std::vector<std::string> segments;
    {
      std::size_t start = 0;
      while (start < path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string_view::npos ? path.size() : slash;
        if (end > start) segments.emplace_back(path.substr(start, end - start));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
      }
    }
    const auto n = segments.size();
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (n < 2 || segments[0] != "v1") return error_response(404, ApiErrorCode::entity_not_found, "no such route");
    const std::string& area = segments[1];

    if (area == "predict" && n == 2 && post) return predict(parse_body());
    if (area == "patents" && n == 2 && get) return patents(query);
    if (area == "patents" && n == 3 && get) return patent(segments[2]);
    if (area == "inventors" && n == 4 && segments[3] == "summary" && get) {
      return entity_summary(store::EntityKind::Inventor, segments[2]);
    }
    if (area == "orgs" && n == 3 && segments[2] == "summary" && get) {
      return org_batch_summary(param(query, "ids").value_or(""));
    }
    if (area == "orgs" && n == 4 && segments[3] == "summary" && get) {
      return entity_summary(store::EntityKind::Organisation, segments[2]);
    }
    if (area == "stats" && n == 3 && segments[2] == "grant-lag" && get) return grant_lag_stats(query);
    if (area == "models" && n == 3 && segments[2] == "current" && get) return model_info();
    if (area == "admin" && n == 4 && segments[2] == "models" && segments[3] == "load" && post) {
      return load_model(parse_body());
    }
    return error_response(404, ApiErrorCode::entity_not_found, "no such route");
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::exception& e) {
    return error_response(500, ApiErrorCode::internal, e.what());
  }
}

void bind_routes(httplib::Server& server, ApiService& service) {
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    QueryParams query(req.params.begin(), req.params.end());
    const ApiResponse r = service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.text(), "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
}

}  // namespace patentlens::api
