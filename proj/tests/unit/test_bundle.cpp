#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include <unistd.h>

#include "patentlens/error.hpp"
#include "patentlens/model/bundle.hpp"
#include "synthetic.hpp"

using namespace patentlens;
using namespace patentlens::model;
namespace fs = std::filesystem;

namespace {

store::PatentStore corpus_store(std::size_t n, std::uint64_t seed) {
  auto db = store::PatentStore::in_memory();
  for (auto& d : testing::synthetic_corpus(n, seed)) db.upsert(std::move(d));
  return db;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("pl_bundle_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("bundle") {
  TEST_CASE("dataset needs 50 eligible grants") {
    auto db = store::PatentStore::in_memory();
    db.upsert(testing::minimal_grant("1", 10));
    const auto schema = features::make_schema(256);
    CHECK_THROWS_WITH(build_dataset(db, schema, ClockOrigin::FilingDate, 1), doctest::Contains("insufficient data"));
  }

  TEST_CASE("split sizes honour the fractions") {
    std::vector<std::string> numbers;
    for (int i = 0; i < 1000; ++i) numbers.push_back(std::to_string(5000000 + i * 7));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto splits = assign_splits(numbers, seed);
      std::map<Split, int> counts;
      for (auto s : splits) ++counts[s];
      CHECK(std::abs(counts[Split::Train] - 700) <= 1);
      CHECK(std::abs(counts[Split::Calibrate] - 150) <= 1);
      CHECK(std::abs(counts[Split::Test] - 150) <= 1);
      // independent of input order
      auto reversed = numbers;
      std::reverse(reversed.begin(), reversed.end());
      auto splits_rev = assign_splits(reversed, seed);
      std::reverse(splits_rev.begin(), splits_rev.end());
      CHECK(splits == splits_rev);
    }
    CHECK(assign_splits(numbers, 1) != assign_splits(numbers, 2));
  }

  TEST_CASE("dataset rows are eligible grants with calendar-day targets") {
    const auto db = corpus_store(200, 3);
    const auto schema = features::make_schema(512);
    const auto ds = build_dataset(db, schema, ClockOrigin::FilingDate, 7);
    std::size_t grants = 0;
    for (const auto& d : db.documents()) grants += d.doc_kind == DocKind::Grant;
    CHECK(ds.doc_numbers.size() == grants);
    CHECK(ds.X.cols() == static_cast<Eigen::Index>(schema.total_dim()));
    CHECK((ds.y.array() >= 0).all());
    const auto again = build_dataset(db, schema, ClockOrigin::FilingDate, 7);
    CHECK(ds.splits == again.splits);
    CHECK(ds.X == again.X);
    for (std::size_t i = 0; i < ds.doc_numbers.size(); ++i) {
      const auto doc = db.get(ds.doc_numbers[i], DocKind::Grant);
      REQUIRE(doc);
      CHECK(ds.y[static_cast<Eigen::Index>(i)] == static_cast<double>(*grant_lag_days(*doc)));
    }
  }

  TEST_CASE("metrics of perfect and constant predictors") {
    Eigen::VectorXd y(2);
    y << 0, 10;
    std::vector<PredictionResult> perfect = {{0, 0, 0, 1, Band::Green}, {10, 10, 10, 1, Band::Green}};
    const auto m = evaluate_predictions(perfect, y);
    CHECK(m.mae_days == 0);
    CHECK(m.rmse_days == 0);
    CHECK(m.coverage == 1.0);
    std::vector<PredictionResult> constant = {{5, 4, 6, 0.5, Band::Amber}, {5, 0, 12, 0.2, Band::Red}};
    const auto c = evaluate_predictions(constant, y);
    CHECK(c.mae_days == 5);
    CHECK(c.rmse_days == 5);
    CHECK(c.coverage == 0.5);
    CHECK(c.mean_interval_width_days == 7);
    CHECK_THROWS_WITH(evaluate_predictions({}, Eigen::VectorXd()), "no test data");
  }

  TEST_CASE("train, save, load, predict") {
    const auto db = corpus_store(300, 11);
    const auto schema = features::make_schema(1024);
    const auto ds = build_dataset(db, schema, ClockOrigin::FilingDate, 42);
    TrainingConfig config;
    config.rounds_grid = {20, 40};
    const auto outcome = train_and_select(ds, schema, config, "2026-01-01T00:00:00Z");
    CHECK(outcome.candidates.size() == 5);
    const auto& bundle = outcome.bundle;
    CHECK(bundle.model_id == compute_model_id(bundle));
    CHECK(bundle.model_id.rfind("glm-", 0) == 0);

    // metrics equal a recomputation from the stored predictions
    const auto X = ds.features(Split::Test);
    const auto y = ds.targets(Split::Test);
    double abs_sum = 0, sq_sum = 0, width = 0;
    std::size_t covered = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const auto r = predict_with_interval(bundle.point_model, bundle.calibration, X.row(i));
      abs_sum += std::abs(r.point_days - y[i]);
      sq_sum += (r.point_days - y[i]) * (r.point_days - y[i]);
      width += r.interval_high_days - r.interval_low_days;
      covered += r.interval_low_days <= y[i] && y[i] <= r.interval_high_days;
    }
    const double n = static_cast<double>(X.rows());
    CHECK(bundle.metrics.mae_days == doctest::Approx(abs_sum / n).epsilon(1e-12));
    CHECK(bundle.metrics.rmse_days == doctest::Approx(std::sqrt(sq_sum / n)).epsilon(1e-12));
    CHECK(bundle.metrics.coverage == doctest::Approx(static_cast<double>(covered) / n));
    CHECK(bundle.metrics.mean_interval_width_days == doctest::Approx(width / n).epsilon(1e-12));

    const auto path = temp_file("model.json");
    save_bundle(bundle, path);
    const auto loaded = load_bundle(path);
    CHECK(loaded.model_id == bundle.model_id);
    CHECK(loaded.trained_at == bundle.trained_at);
    for (const auto& doc : db.documents()) {
      const auto fv = features::assemble_features(doc, schema);
      const auto a = predict_grant_lag(bundle, fv);
      const auto b = predict_grant_lag(loaded, fv);
      CHECK(std::abs(a.point_days - b.point_days) <= 1e-12);
      CHECK(std::abs(a.interval_high_days - b.interval_high_days) <= 1e-12);
      CHECK(a.band == b.band);
    }
    const auto path2 = temp_file("model2.json");
    save_bundle(loaded, path2);
    CHECK(slurp(path) == slurp(path2));

    const auto other = features::assemble_features(db.documents().front(), features::make_schema(512));
    CHECK_THROWS_WITH(predict_grant_lag(bundle, other), "feature schema mismatch");
    fs::remove(path);
    fs::remove(path2);
  }

  TEST_CASE("bundle files are validated on load") {
    const auto path = temp_file("bad.json");
    std::ofstream(path) << R"({"magic": "NOTMODEL", "version": 1})";
    CHECK_THROWS_AS(load_bundle(path), Error);
    std::ofstream(path) << "not json";
    CHECK_THROWS_AS(load_bundle(path), Error);
    CHECK_THROWS_AS(load_bundle(temp_file("missing.json")), Error);
    fs::remove(path);
  }
}
