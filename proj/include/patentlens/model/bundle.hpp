#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patentlens/features/pipeline.hpp"
#include "patentlens/model/conformal.hpp"
#include "patentlens/model/dataset.hpp"

namespace patentlens::model {

struct Metrics {
  double mae_days = 0;
  double rmse_days = 0;
  double coverage = 0;
  double mean_interval_width_days = 0;
};

struct TrainedModelBundle {
  std::string model_id;
  features::FeatureSchema schema;
  PointModel point_model;
  ConformalCalibration calibration;
  Metrics metrics;
  std::string trained_at;
};

/// Throws Error(schema_mismatch, "feature schema mismatch") when the vector was
/// built with a different layout than the bundle's.
PredictionResult predict_grant_lag(const TrainedModelBundle& bundle, const features::FeatureVector& features);

/// Metrics of interval predictions against targets. Throws
/// Error(insufficient_data, "no test data") on empty input.
Metrics evaluate_predictions(std::span<const PredictionResult> predictions, const Eigen::Ref<const Eigen::VectorXd>& y);

Metrics evaluate_model(const PointModel& point_model, const ConformalCalibration& calibration,
                       const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Test-split metrics of a bundle on a dataset built with the same schema.
Metrics evaluate_model(const TrainedModelBundle& bundle, const Dataset& dataset);

inline constexpr std::string_view kBundleMagic = "PATMODEL";
inline constexpr int kBundleVersion = 1;

nlohmann::json to_json(const Metrics& m);
nlohmann::json bundle_to_json(const TrainedModelBundle& bundle);
TrainedModelBundle bundle_from_json(const nlohmann::json& j);

/// Content hash of everything except model_id and trained_at.
std::string compute_model_id(const TrainedModelBundle& bundle);

void save_bundle(const TrainedModelBundle& bundle, const std::filesystem::path& path);
TrainedModelBundle load_bundle(const std::filesystem::path& path);

struct TrainingConfig {
  std::vector<double> lambda_grid = {0.1, 1.0, 10.0};
  std::vector<int> rounds_grid = {100, 200};
  BoostingParams tree_params;
  DifficultySpec difficulty;
  double alpha = 0.1;
};

struct CandidateResult {
  std::string name;  ///< "ridge(lambda=1)" or "boosted_trees(rounds=200)"
  double test_mae_days = 0;
};

struct TrainingOutcome {
  TrainedModelBundle bundle;
  std::vector<CandidateResult> candidates;
};

/// Trains every grid candidate on the train split, keeps the lowest test MAE
/// (earliest candidate on ties, ridge grid first), calibrates it on the
/// calibration split and records test metrics.
TrainingOutcome train_and_select(const Dataset& dataset, const features::FeatureSchema& schema,
                                 const TrainingConfig& config, std::string trained_at);

}  // namespace patentlens::model
