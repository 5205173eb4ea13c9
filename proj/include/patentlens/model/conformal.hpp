#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "patentlens/model/boosted_trees.hpp"
#include "patentlens/model/ridge.hpp"

namespace patentlens::model {

using PointModel = std::variant<RidgeModel<double>, BoostedTreesModel>;

const char* learner_name(const PointModel& m);

template <class Row>
double predict_row(const PointModel& m, const Row& x) {
  return std::visit(
      [&](const auto& model) -> double {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, BoostedTreesModel>) {
          return model.predict_row(x);
        } else {
          return x.dot(model.weights.transpose()) + model.intercept;
        }
      },
      m);
}

Eigen::VectorXd predict(const PointModel& m, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Learner for the absolute-residual model. Boosted trees are used when the
/// calibration set has at least 2 * min_leaf rows, ridge otherwise.
struct DifficultySpec {
  BoostingParams trees{.max_depth = 2, .rounds = 50, .min_leaf = 20, .learning_rate = 0.1};
  double ridge_lambda = 10.0;
};

inline constexpr double kDifficultyFloorDays = 1.0;
inline constexpr std::size_t kMinCalibrationRows = 20;

/// Normalized split-conformal calibration.
struct ConformalCalibration {
  double alpha = 0.1;
  double q_hat = 0;  ///< conformal quantile of |residual| / difficulty
  double tau = 1;    ///< median calibration half-width; confidence is 0.5 there
  double epsilon = kDifficultyFloorDays;
  PointModel difficulty_model;
};

/// k = ceil((n + 1)(1 - alpha)), the order statistic used as q_hat.
std::size_t conformal_rank(std::size_t n, double alpha);

/// Fits the difficulty model on (X, |y - point(X)|) and calibrates q_hat and
/// tau. From 40 rows up the model sees the first n/2 rows and q_hat, tau come
/// from the rest; below that both use every row. When k exceeds n, q_hat is max(score) * 10. Throws
/// Error(insufficient_data, "insufficient calibration data") for n < 20.
ConformalCalibration fit_conformal(const PointModel& point_model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& y, double alpha,
                                   const DifficultySpec& spec = {});

template <class Row>
double difficulty(const ConformalCalibration& c, const Row& x) {
  return std::max(c.epsilon, predict_row(c.difficulty_model, x));
}

enum class Band { Green, Amber, Red };

const char* to_string(Band band);

inline constexpr double kGreenThreshold = 0.6;
inline constexpr double kAmberThreshold = 0.4;

/// tau / (tau + half_width); 1 for a zero-width interval.
double confidence_score(double half_width, double tau);
Band band_for(double confidence);

struct PredictionResult {
  double point_days = 0;
  double interval_low_days = 0;
  double interval_high_days = 0;
  double confidence = 1;
  Band band = Band::Green;
};

template <class Row>
PredictionResult predict_with_interval(const PointModel& point_model, const ConformalCalibration& c, const Row& x) {
  PredictionResult r;
  r.point_days = std::max(0.0, predict_row(point_model, x));
  const double half_width = c.q_hat * difficulty(c, x);
  r.interval_low_days = std::max(0.0, r.point_days - half_width);
  r.interval_high_days = r.point_days + half_width;
  r.confidence = confidence_score(half_width, c.tau);
  r.band = band_for(r.confidence);
  return r;
}

}  // namespace patentlens::model
