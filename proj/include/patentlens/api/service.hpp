#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "patentlens/model/bundle.hpp"
#include "patentlens/store/patent_store.hpp"

namespace httplib {
class Server;
}

namespace patentlens::api {

using nlohmann::json;

/// Pinned error codes carried in every error body.
enum class ApiErrorCode { invalid_payload, entity_not_found, no_model_loaded, schema_mismatch, internal };

const char* to_string(ApiErrorCode code);

struct ApiResponse {
  int status = 200;
  json body;

  std::string text() const { return body.dump(); }
};

ApiResponse error_response(int status, ApiErrorCode code, std::string message);

using QueryParams = std::multimap<std::string, std::string>;

/// Transport-independent implementation of the /v1 routes. The store and the
/// current model bundle are shared read-only; swapping the bundle is atomic
/// with respect to in-flight requests.
class ApiService {
 public:
  explicit ApiService(std::shared_ptr<const store::PatentStore> store,
                      std::shared_ptr<const model::TrainedModelBundle> bundle = nullptr);

  void set_model(std::shared_ptr<const model::TrainedModelBundle> bundle);
  std::shared_ptr<const model::TrainedModelBundle> model() const;

  /// Routes one request. Never throws; failures become error bodies.
  ApiResponse handle(std::string_view method, std::string_view path, const QueryParams& query,
                     std::string_view body);

  ApiResponse predict(const json& request) const;
  ApiResponse patents(const QueryParams& query) const;
  ApiResponse patent(std::string_view doc_number) const;
  ApiResponse entity_summary(store::EntityKind kind, std::string_view id) const;
  ApiResponse org_batch_summary(std::string_view ids) const;
  ApiResponse grant_lag_stats(const QueryParams& query) const;
  ApiResponse model_info() const;
  ApiResponse load_model(const json& request);

 private:
  json summary_json(const store::SummaryStats& s, const model::TrainedModelBundle* bundle) const;

  std::shared_ptr<const store::PatentStore> store_;
  mutable std::mutex model_mutex_;
  std::shared_ptr<const model::TrainedModelBundle> bundle_;
};

/// Inline PredictRequest document -> Application PatentDocument. Throws
/// Error(invalid_argument) on missing or ill-typed fields.
PatentDocument inline_document(const json& j);

json to_json(const model::PredictionResult& r, const std::string& model_id);
json to_json(const store::GrantLagStats& s);

/// Installs a catch-all handler on `server` that forwards to `service`.
void bind_routes(httplib::Server& server, ApiService& service);

}  // namespace patentlens::api
