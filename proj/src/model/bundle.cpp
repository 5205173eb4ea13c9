#include "patentlens/model/bundle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "patentlens/error.hpp"
#include "patentlens/features/text.hpp"

namespace patentlens::model {

using nlohmann::json;

PredictionResult predict_grant_lag(const TrainedModelBundle& bundle, const features::FeatureVector& features) {
  if (features.schema_id != bundle.schema.schema_id ||
      features.values.size() != static_cast<Eigen::Index>(bundle.schema.total_dim())) {
    fail(Errc::schema_mismatch, "feature schema mismatch");
  }
  return predict_with_interval(bundle.point_model, bundle.calibration, features.values.transpose());
}

Metrics evaluate_predictions(std::span<const PredictionResult> predictions, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (predictions.empty() || y.size() == 0) fail(Errc::insufficient_data, "no test data");
  if (static_cast<Eigen::Index>(predictions.size()) != y.size()) {
    fail(Errc::invalid_argument, "prediction and target counts differ");
  }
  double abs_sum = 0, sq_sum = 0, covered = 0, width = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const double target = y[static_cast<Eigen::Index>(i)];
    const double err = target - p.point_days;
    abs_sum += std::abs(err);
    sq_sum += err * err;
    if (p.interval_low_days <= target && target <= p.interval_high_days) covered += 1;
    width += p.interval_high_days - p.interval_low_days;
  }
  const auto n = static_cast<double>(predictions.size());
  return {abs_sum / n, std::sqrt(sq_sum / n), covered / n, width / n};
}

Metrics evaluate_model(const PointModel& point_model, const ConformalCalibration& calibration,
                       const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y) {
  std::vector<PredictionResult> preds;
  preds.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) preds.push_back(predict_with_interval(point_model, calibration, X.row(i)));
  return evaluate_predictions(preds, y);
}

Metrics evaluate_model(const TrainedModelBundle& bundle, const Dataset& dataset) {
  if (dataset.schema_id != bundle.schema.schema_id) fail(Errc::schema_mismatch, "feature schema mismatch");
  return evaluate_model(bundle.point_model, bundle.calibration, dataset.features(Split::Test),
                        dataset.targets(Split::Test));
}

// ---- serialization ---------------------------------------------------------

namespace {

double finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(Errc::numerical, std::string("non-finite ") + what);
  return v;
}

json tree_to_json(const RegressionTree& t, int node) {
  const auto& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return {{"leaf_value", finite(n.leaf_value, "leaf value")}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", tree_to_json(t, n.left)},
          {"right", tree_to_json(t, n.right)}};
}

int tree_from_json(const json& j, RegressionTree& t, Eigen::Index feature_dim, int depth) {
  if (depth > 64) fail(Errc::invalid_argument, "tree too deep");
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf_value")) {
    t.nodes[static_cast<std::size_t>(id)].leaf_value = j.at("leaf_value").get<double>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || feature >= feature_dim) fail(Errc::invalid_argument, "split feature out of range");
  const double threshold = j.at("threshold").get<double>();
  const int left = tree_from_json(j.at("left"), t, feature_dim, depth + 1);
  const int right = tree_from_json(j.at("right"), t, feature_dim, depth + 1);
  auto& n = t.nodes[static_cast<std::size_t>(id)];
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return id;
}

json model_to_json(const PointModel& m) {
  return std::visit(
      [](const auto& model) -> json {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, BoostedTreesModel>) {
          json trees = json::array();
          for (const auto& t : model.trees) trees.push_back(tree_to_json(t, 0));
          return {{"learner", "boosted_trees"},
                  {"initial_prediction", finite(model.initial_prediction, "initial prediction")},
                  {"learning_rate", model.learning_rate},
                  {"params",
                   {{"max_depth", model.params.max_depth},
                    {"rounds", model.params.rounds},
                    {"min_leaf", model.params.min_leaf}}},
                  {"feature_dim", model.feature_dim},
                  {"trees", std::move(trees)}};
        } else {
          std::vector<double> w(model.weights.data(), model.weights.data() + model.weights.size());
          for (double v : w) finite(v, "ridge weight");
          return {{"learner", "ridge"},
                  {"lambda", model.lambda},
                  {"intercept", finite(model.intercept, "intercept")},
                  {"weights", std::move(w)}};
        }
      },
      m);
}

PointModel model_from_json(const json& j) {
  const auto learner = j.at("learner").get<std::string>();
  if (learner == "ridge") {
    RidgeModel<double> m;
    m.lambda = j.at("lambda").get<double>();
    m.intercept = j.at("intercept").get<double>();
    const auto w = j.at("weights").get<std::vector<double>>();
    m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return m;
  }
  if (learner == "boosted_trees") {
    BoostedTreesModel m;
    m.initial_prediction = j.at("initial_prediction").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    const auto& p = j.at("params");
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.rounds = p.at("rounds").get<int>();
    m.params.min_leaf = p.at("min_leaf").get<std::size_t>();
    m.params.learning_rate = m.learning_rate;
    m.feature_dim = j.at("feature_dim").get<Eigen::Index>();
    for (const auto& tj : j.at("trees")) {
      RegressionTree t;
      tree_from_json(tj, t, m.feature_dim, 0);
      m.trees.push_back(std::move(t));
    }
    return m;
  }
  fail(Errc::invalid_argument, "unknown learner: " + learner);
}

Eigen::Index model_dim(const PointModel& m) {
  return std::visit(
      [](const auto& model) -> Eigen::Index {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, BoostedTreesModel>) {
          return model.feature_dim;
        } else {
          return model.weights.size();
        }
      },
      m);
}

json body_without_identity(const TrainedModelBundle& b) {
  return {{"magic", kBundleMagic},
          {"version", kBundleVersion},
          {"schema_id", b.schema.schema_id},
          {"schema",
           {{"engineered_names", b.schema.engineered_names},
            {"derived_names", b.schema.derived_names},
            {"hash_dim", b.schema.hash_dim},
            {"ngram_orders", b.schema.ngram_orders}}},
          {"learner", learner_name(b.point_model)},
          {"point_model", model_to_json(b.point_model)},
          {"calibration",
           {{"alpha", b.calibration.alpha},
            {"q_hat", finite(b.calibration.q_hat, "q_hat")},
            {"tau", finite(b.calibration.tau, "tau")},
            {"epsilon", b.calibration.epsilon},
            {"difficulty_model", model_to_json(b.calibration.difficulty_model)}}},
          {"metrics", to_json(b.metrics)}};
}

}  // namespace

json to_json(const Metrics& m) {
  return {{"mae_days", m.mae_days},
          {"rmse_days", m.rmse_days},
          {"coverage", m.coverage},
          {"mean_interval_width_days", m.mean_interval_width_days}};
}

std::string compute_model_id(const TrainedModelBundle& bundle) {
  return "glm-" + features::hex64(features::fnv1a64(body_without_identity(bundle).dump()));
}

json bundle_to_json(const TrainedModelBundle& bundle) {
  json j = body_without_identity(bundle);
  j["model_id"] = bundle.model_id;
  j["trained_at"] = bundle.trained_at;
  return j;
}

TrainedModelBundle bundle_from_json(const json& j) {
  try {
    if (j.at("magic").get<std::string>() != kBundleMagic) fail(Errc::invalid_argument, "not a model bundle");
    if (j.at("version").get<int>() != kBundleVersion) fail(Errc::invalid_argument, "unsupported bundle version");
    TrainedModelBundle b;
    const auto& s = j.at("schema");
    b.schema = features::make_schema(s.at("hash_dim").get<std::size_t>(), s.at("ngram_orders").get<std::vector<int>>());
    if (b.schema.schema_id != j.at("schema_id").get<std::string>() ||
        s.at("engineered_names").get<std::vector<std::string>>() != b.schema.engineered_names ||
        s.at("derived_names").get<std::vector<std::string>>() != b.schema.derived_names) {
      fail(Errc::schema_mismatch, "feature schema mismatch");
    }
    b.point_model = model_from_json(j.at("point_model"));
    const auto& c = j.at("calibration");
    b.calibration.alpha = c.at("alpha").get<double>();
    b.calibration.q_hat = c.at("q_hat").get<double>();
    b.calibration.tau = c.at("tau").get<double>();
    b.calibration.epsilon = c.at("epsilon").get<double>();
    b.calibration.difficulty_model = model_from_json(c.at("difficulty_model"));
    const auto dim = static_cast<Eigen::Index>(b.schema.total_dim());
    if (model_dim(b.point_model) != dim || model_dim(b.calibration.difficulty_model) != dim) {
      fail(Errc::schema_mismatch, "feature schema mismatch");
    }
    const auto& m = j.at("metrics");
    b.metrics = {m.at("mae_days").get<double>(), m.at("rmse_days").get<double>(), m.at("coverage").get<double>(),
                 m.at("mean_interval_width_days").get<double>()};
    b.model_id = j.at("model_id").get<std::string>();
    b.trained_at = j.at("trained_at").get<std::string>();
    return b;
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed model bundle: ") + e.what());
  }
}

void save_bundle(const TrainedModelBundle& bundle, const std::filesystem::path& path) {
  const std::string text = bundle_to_json(bundle).dump() + "\n";
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) fail(Errc::io, "cannot write model bundle: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TrainedModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read model bundle: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("model bundle is not valid JSON: ") + e.what());
  }
  return bundle_from_json(j);
}

// ---- training ---------------------------------------------------------------

TrainingOutcome train_and_select(const Dataset& dataset, const features::FeatureSchema& schema,
                                 const TrainingConfig& config, std::string trained_at) {
  if (dataset.schema_id != schema.schema_id) fail(Errc::schema_mismatch, "feature schema mismatch");
  const Eigen::MatrixXd X_train = dataset.features(Split::Train);
  const Eigen::VectorXd y_train = dataset.targets(Split::Train);
  const Eigen::MatrixXd X_test = dataset.features(Split::Test);
  const Eigen::VectorXd y_test = dataset.targets(Split::Test);
  if (X_test.rows() == 0) fail(Errc::insufficient_data, "no test data");

  TrainingOutcome out;
  PointModel best;
  double best_mae = std::numeric_limits<double>::infinity();
  auto consider = [&](std::string name, PointModel candidate) {
    const Eigen::VectorXd pred = predict(candidate, X_test).cwiseMax(0.0);
    const double mae = (pred - y_test).cwiseAbs().mean();
    out.candidates.push_back({std::move(name), mae});
    if (mae < best_mae) {
      best_mae = mae;
      best = std::move(candidate);
    }
  };

  for (double lambda : config.lambda_grid) {
    std::ostringstream name;
    name << "ridge(lambda=" << lambda << ")";
    consider(name.str(), train_ridge(X_train, y_train, lambda));
  }
  if (!config.rounds_grid.empty()) {
    // Boosting is deterministic, so a shorter run is a prefix of the longest.
    BoostingParams params = config.tree_params;
    params.rounds = *std::max_element(config.rounds_grid.begin(), config.rounds_grid.end());
    const BoostedTreesModel full = train_boosted_trees(X_train, y_train, params);
    for (int rounds : config.rounds_grid) {
      BoostedTreesModel m = full;
      m.params.rounds = rounds;
      if (m.trees.size() > static_cast<std::size_t>(rounds)) m.trees.resize(static_cast<std::size_t>(rounds));
      m.training_rmse.resize(std::min(m.training_rmse.size(), m.trees.size() + 1));
      consider("boosted_trees(rounds=" + std::to_string(rounds) + ")", std::move(m));
    }
  }
  if (out.candidates.empty()) fail(Errc::invalid_argument, "empty hyperparameter grid");

  TrainedModelBundle& b = out.bundle;
  b.schema = schema;
  b.point_model = std::move(best);
  b.calibration = fit_conformal(b.point_model, dataset.features(Split::Calibrate), dataset.targets(Split::Calibrate),
                                config.alpha, config.difficulty);
  b.metrics = evaluate_model(b.point_model, b.calibration, X_test, y_test);
  b.trained_at = std::move(trained_at);
  b.model_id = compute_model_id(b);
  return out;
}

}  // namespace patentlens::model
