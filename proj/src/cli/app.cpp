#include "patentlens/cli/app.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "patentlens/api/service.hpp"
#include "patentlens/error.hpp"
#include "patentlens/ingest/ingest.hpp"
#include "patentlens/json_io.hpp"
#include "patentlens/model/bundle.hpp"
#include "patentlens/store/patent_store.hpp"

namespace patentlens::cli {

using nlohmann::json;

namespace {

model::ClockOrigin parse_origin(const std::string& s) {
  if (s == "filing_date") return model::ClockOrigin::FilingDate;
  if (s == "publication_date") return model::ClockOrigin::PublicationDate;
  fail(Errc::invalid_argument, "clock_origin must be filing_date or publication_date");
}

std::string timestamp_now(const RunConfig& config) {
  if (!config.trained_at.empty()) return config.trained_at;
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) fail(Errc::invalid_argument, std::string(flag) + " is required");
}

store::AliasTable load_aliases(const RunConfig& c) {
  return c.alias_table_path.empty() ? store::AliasTable{} : store::AliasTable::load(c.alias_table_path);
}

features::FeatureSchema schema_of(const RunConfig& c) { return features::make_schema(c.hash_dim, c.ngram_orders); }

int cmd_ingest(const RunConfig& c, const std::string& input, const std::string& export_path,
               const std::string& quarantine_path, std::ostream& out) {
  require(c.store_path, "--store-path");
  require(input, "--input");
  auto files = ingest::list_input_files(input);  // fail on unreadable input before touching the store
  (void)files;
  auto db = store::PatentStore::open(c.store_path, load_aliases(c));
  std::ofstream exporter;
  if (!export_path.empty()) {
    exporter.open(export_path, std::ios::binary | std::ios::trunc);
    if (!exporter) fail(Errc::io, "cannot write " + export_path);
  }
  const auto report = ingest::ingest_path(
      input,
      [&](PatentDocument doc) {
        if (exporter.is_open()) exporter << to_json(doc).dump() << '\n';
        db.upsert(std::move(doc));
      },
      {.workers = c.workers});
  if (!quarantine_path.empty()) {
    std::ofstream q(quarantine_path, std::ios::binary | std::ios::trunc);
    for (const auto& r : report.quarantine_records) q << to_json(r).dump() << '\n';
    if (!q) fail(Errc::io, "cannot write " + quarantine_path);
  }
  json result = to_json(report);
  result["store_records"] = db.size();
  out << result.dump() << '\n';
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.store_path, "--store-path");
  require(c.model_path, "--model-path");
  const auto db = store::PatentStore::open(c.store_path, load_aliases(c));
  const auto schema = schema_of(c);
  const auto ds = model::build_dataset(db, schema, c.clock_origin, c.split_seed);
  model::TrainingConfig tc;
  tc.lambda_grid = c.lambda_grid;
  tc.rounds_grid = c.rounds_grid;
  tc.alpha = c.alpha;
  err << "training on " << ds.indices(model::Split::Train).size() << " grants\n";
  const auto outcome = model::train_and_select(ds, schema, tc, timestamp_now(c));
  model::save_bundle(outcome.bundle, c.model_path);
  json candidates = json::array();
  for (const auto& cand : outcome.candidates) {
    candidates.push_back({{"name", cand.name}, {"test_mae_days", cand.test_mae_days}});
  }
  out << json{{"model_id", outcome.bundle.model_id},
              {"learner", model::learner_name(outcome.bundle.point_model)},
              {"metrics", model::to_json(outcome.bundle.metrics)},
              {"candidates", std::move(candidates)},
              {"dataset",
               {{"rows", ds.doc_numbers.size()},
                {"train", ds.indices(model::Split::Train).size()},
                {"calibrate", ds.indices(model::Split::Calibrate).size()},
                {"test", ds.indices(model::Split::Test).size()}}}}
             .dump()
      << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  require(c.store_path, "--store-path");
  require(c.model_path, "--model-path");
  const auto bundle = model::load_bundle(c.model_path);
  const auto db = store::PatentStore::open(c.store_path, load_aliases(c));
  const auto ds = model::build_dataset(db, bundle.schema, c.clock_origin, c.split_seed);
  out << json{{"model_id", bundle.model_id}, {"metrics", model::to_json(model::evaluate_model(bundle, ds))}}.dump()
      << '\n';
  return 0;
}

int cmd_predict(const RunConfig& c, const std::string& input, std::istream& in, std::ostream& out) {
  require(c.model_path, "--model-path");
  const auto bundle = model::load_bundle(c.model_path);
  std::string text;
  if (input.empty() || input == "-") {
    text.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    std::ifstream f(input, std::ios::binary);
    if (!f) fail(Errc::io, "cannot read " + input);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    fail(Errc::invalid_argument, "input document is not valid JSON");
  }
  if (j.is_object() && j.contains("document")) j = j["document"];
  const auto doc = api::inline_document(j);
  const auto result = model::predict_grant_lag(bundle, features::assemble_features(doc, bundle.schema));
  out << api::to_json(result, bundle.model_id).dump() << '\n';
  return 0;
}

int cmd_summary(const RunConfig& c, const std::string& entity, std::ostream& out) {
  require(c.store_path, "--store-path");
  require(entity, "--entity");
  const auto colon = entity.find(':');
  const std::string kind = colon == std::string::npos ? "" : entity.substr(0, colon);
  if (kind != "inventor" && kind != "org") fail(Errc::invalid_argument, "--entity must be inventor:<id> or org:<id>");
  auto db = std::make_shared<const store::PatentStore>(store::PatentStore::open(c.store_path, load_aliases(c)));
  std::shared_ptr<const model::TrainedModelBundle> bundle;
  if (!c.model_path.empty()) bundle = std::make_shared<const model::TrainedModelBundle>(model::load_bundle(c.model_path));
  const api::ApiService service(db, bundle);
  const auto r = service.entity_summary(
      kind == "inventor" ? store::EntityKind::Inventor : store::EntityKind::Organisation, entity.substr(colon + 1));
  out << r.text() << '\n';
  return 0;
}

int cmd_serve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.store_path, "--store-path");
  auto db = std::make_shared<const store::PatentStore>(store::PatentStore::open(c.store_path, load_aliases(c)));
  std::shared_ptr<const model::TrainedModelBundle> bundle;
  if (!c.model_path.empty()) {
    if (std::filesystem::exists(c.model_path)) {
      bundle = std::make_shared<const model::TrainedModelBundle>(model::load_bundle(c.model_path));
    } else {
      err << "model " << c.model_path << " not found; serving without a model\n";
    }
  }
  api::ApiService service(db, bundle);
  httplib::Server server;
  api::bind_routes(server, service);
  if (!server.bind_to_port(c.host, c.port)) fail(Errc::io, "cannot bind " + c.host + ":" + std::to_string(c.port));
  out << json{{"listening", {{"host", c.host}, {"port", c.port}}}}.dump() << std::endl;
  if (!server.listen_after_bind()) fail(Errc::internal, "server stopped unexpectedly");
  return 0;
}

}  // namespace

json bulk_data_urls(const std::string& from, const std::string& to) {
  const auto start = Date::parse(from);
  const auto end = Date::parse(to);
  if (!start || !end || *end < *start) fail(Errc::invalid_argument, "invalid range");
  json urls = json::array();
  // Grants are issued on Tuesdays, applications published on Thursdays.
  for (auto day = start->days_since_epoch(); day <= end->days_since_epoch(); ++day) {
    const Date d = Date::from_days(day);
    const auto weekday = std::chrono::weekday{std::chrono::sys_days{std::chrono::days{day}}}.c_encoding();
    const auto iso = d.iso();
    const std::string yymmdd = iso.substr(2, 2) + iso.substr(5, 2) + iso.substr(8, 2);
    const std::string year = iso.substr(0, 4);
    if (weekday == 2) {
      urls.push_back({{"kind", "grant"}, {"date", iso},
                      {"url", "https://bulkdata.uspto.gov/data/patent/grant/redbook/fulltext/" + year + "/ipg" + yymmdd + ".zip"}});
    } else if (weekday == 4) {
      urls.push_back({{"kind", "application"}, {"date", iso},
                      {"url", "https://bulkdata.uspto.gov/data/patent/application/redbook/fulltext/" + year + "/ipa" + yymmdd + ".zip"}});
    }
  }
  return urls;
}

void apply_config_json(RunConfig& c, const json& j) {
  if (!j.is_object()) fail(Errc::invalid_argument, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "store_path") c.store_path = v.get<std::string>();
      else if (key == "alias_table_path") c.alias_table_path = v.get<std::string>();
      else if (key == "model_path") c.model_path = v.get<std::string>();
      else if (key == "hash_dim") c.hash_dim = v.get<std::size_t>();
      else if (key == "ngram_orders") c.ngram_orders = v.get<std::vector<int>>();
      else if (key == "lambda_grid") c.lambda_grid = v.get<std::vector<double>>();
      else if (key == "rounds_grid") c.rounds_grid = v.get<std::vector<int>>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "split_seed") c.split_seed = v.get<std::uint64_t>();
      else if (key == "clock_origin") c.clock_origin = parse_origin(v.get<std::string>());
      else if (key == "host") c.host = v.get<std::string>();
      else if (key == "port") c.port = v.get<int>();
      else if (key == "workers") c.workers = v.get<unsigned>();
      else if (key == "trained_at") c.trained_at = v.get<std::string>();
      else fail(Errc::invalid_argument, "unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("bad config value: ") + e.what());
  }
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patent grant-lag analytics", "patentlens"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string store_path, alias_path, model_path, origin, trained_at, host;
  std::size_t hash_dim = 0;
  std::vector<int> ngram_orders, rounds_grid;
  std::vector<double> lambda_grid;
  double alpha = 0;
  std::uint64_t split_seed = 0;
  int port = 0;
  unsigned workers = 0;
  app.add_option("--config", config_path, "JSON config file");
  auto* o_store = app.add_option("--store-path,--store", store_path, "patent store file");
  auto* o_alias = app.add_option("--alias-table-path,--aliases", alias_path, "organisation alias table (JSON)");
  auto* o_model = app.add_option("--model-path,--model", model_path, "model bundle file");
  auto* o_hash = app.add_option("--hash-dim", hash_dim, "hashed feature dimension (power of two)");
  auto* o_ngram = app.add_option("--ngram-orders", ngram_orders, "n-gram orders, subset of {1,2}")->delimiter(',');
  auto* o_lambda = app.add_option("--lambda-grid", lambda_grid, "ridge lambda grid")->delimiter(',');
  auto* o_rounds = app.add_option("--rounds-grid", rounds_grid, "boosting rounds grid")->delimiter(',');
  auto* o_alpha = app.add_option("--alpha", alpha, "conformal miscoverage level in (0,1)");
  auto* o_seed = app.add_option("--split-seed", split_seed, "dataset split seed");
  auto* o_origin = app.add_option("--clock-origin", origin, "filing_date | publication_date");
  auto* o_host = app.add_option("--host", host, "serve: bind address");
  auto* o_port = app.add_option("--port", port, "serve: port");
  auto* o_workers = app.add_option("--workers", workers, "ingest: parallel file workers");
  auto* o_trained = app.add_option("--trained-at", trained_at, "train: timestamp recorded in the bundle");

  std::string input, export_path, quarantine_path, entity, from, to;
  auto* ingest = app.add_subcommand("ingest", "parse bulk XML into the store");
  ingest->add_option("--input", input, "bulk XML file or directory")->required();
  ingest->add_option("--export", export_path, "write parsed documents as JSON Lines");
  ingest->add_option("--quarantine-log", quarantine_path, "write quarantine records as JSON Lines");
  auto* train = app.add_subcommand("train", "train, select and calibrate a grant-lag model");
  auto* evaluate = app.add_subcommand("evaluate", "test-split metrics of a saved model");
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  auto* predict = app.add_subcommand("predict", "predict grant lag for one inline document");
  predict->add_option("--input", input, "document JSON file, or - for standard input");
  auto* summary = app.add_subcommand("summary", "inventor or organisation summary");
  summary->add_option("--entity", entity, "inventor:<id> or org:<id>")->required();
  auto* fetch = app.add_subcommand("fetch", "print bulk-data URLs for a date range (no download)");
  fetch->add_option("--from", from, "YYYY-MM-DD")->required();
  fetch->add_option("--to", to, "YYYY-MM-DD")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) fail(Errc::io, "cannot read config " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception&) {
        fail(Errc::invalid_argument, "config is not valid JSON");
      }
      apply_config_json(c, j);
    }
    if (*o_store) c.store_path = store_path;
    if (*o_alias) c.alias_table_path = alias_path;
    if (*o_model) c.model_path = model_path;
    if (*o_hash) c.hash_dim = hash_dim;
    if (*o_ngram) c.ngram_orders = ngram_orders;
    if (*o_lambda) c.lambda_grid = lambda_grid;
    if (*o_rounds) c.rounds_grid = rounds_grid;
    if (*o_alpha) c.alpha = alpha;
    if (*o_seed) c.split_seed = split_seed;
    if (*o_origin) c.clock_origin = parse_origin(origin);
    if (*o_host) c.host = host;
    if (*o_port) c.port = port;
    if (*o_workers) c.workers = workers;
    if (*o_trained) c.trained_at = trained_at;
    if (!(c.alpha > 0 && c.alpha < 1)) fail(Errc::invalid_argument, "alpha must be in (0, 1)");

    if (*ingest) return cmd_ingest(c, input, export_path, quarantine_path, out);
    if (*train) return cmd_train(c, out, err);
    if (*evaluate) return cmd_evaluate(c, out);
    if (*serve) return cmd_serve(c, out, err);
    if (*predict) return cmd_predict(c, input, in, out);
    if (*summary) return cmd_summary(c, entity, out);
    if (*fetch) {
      out << bulk_data_urls(from, to).dump() << '\n';
      return 0;
    }
    err << app.help();
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::internal ? 2 : 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace patentlens::cli
