#include "patentlens/model/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "patentlens/error.hpp"
#include "patentlens/store/stats.hpp"

namespace patentlens::model {

const char* learner_name(const PointModel& m) {
  return std::holds_alternative<BoostedTreesModel>(m) ? "boosted_trees" : "ridge";
}

Eigen::VectorXd predict(const PointModel& m, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const Eigen::MatrixBase<Eigen::Ref<const Eigen::MatrixXd>>& rows = X;
  return std::visit([&](const auto& model) -> Eigen::VectorXd { return model::predict(model, rows); }, m);
}

std::size_t conformal_rank(std::size_t n, double alpha) {
  // 1e-9: 10 * 0.9 is not exactly 9
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n + 1) * (1.0 - alpha) - 1e-9));
}

ConformalCalibration fit_conformal(const PointModel& point_model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& y, double alpha,
                                   const DifficultySpec& spec) {
  if (!(alpha > 0 && alpha < 1)) fail(Errc::invalid_argument, "alpha must be in (0, 1)");
  if (X.rows() != y.size()) fail(Errc::invalid_argument, "X and y row counts differ");
  const auto n = static_cast<std::size_t>(y.size());
  if (n < kMinCalibrationRows) fail(Errc::insufficient_data, "insufficient calibration data");

  const Eigen::VectorXd residual = (y - predict(point_model, X)).cwiseAbs();

  // n >= 40: difficulty fit on the first half, scores from the second
  const auto fit_rows = n >= 2 * kMinCalibrationRows ? static_cast<Eigen::Index>(n / 2) : 0;
  const Eigen::Index fit_end = fit_rows > 0 ? fit_rows : static_cast<Eigen::Index>(n);
  const Eigen::Index score_begin = fit_rows;
  const auto m = static_cast<std::size_t>(static_cast<Eigen::Index>(n) - score_begin);

  ConformalCalibration c;
  c.alpha = alpha;
  if (static_cast<std::size_t>(fit_end) >= 2 * spec.trees.min_leaf) {
    c.difficulty_model = train_boosted_trees(X.topRows(fit_end), residual.head(fit_end), spec.trees);
  } else {
    c.difficulty_model = train_ridge(X.topRows(fit_end), residual.head(fit_end), spec.ridge_lambda);
  }

  std::vector<double> scores(m), widths(m);
  Eigen::VectorXd d(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = score_begin + static_cast<Eigen::Index>(i);
    d[static_cast<Eigen::Index>(i)] = difficulty(c, X.row(row));
    scores[i] = residual[row] / d[static_cast<Eigen::Index>(i)];
  }
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = conformal_rank(m, alpha);
  c.q_hat = k > m ? sorted.back() * 10.0 : sorted[std::max<std::size_t>(k, 1) - 1];

  for (std::size_t i = 0; i < m; ++i) widths[i] = c.q_hat * d[static_cast<Eigen::Index>(i)];
  std::sort(widths.begin(), widths.end());
  c.tau = std::max(store::percentile_linear(widths, 0.5), 1e-9);
  return c;
}

const char* to_string(Band band) {
  switch (band) {
    case Band::Green: return "Green";
    case Band::Amber: return "Amber";
    case Band::Red: return "Red";
  }
  return "Red";
}

double confidence_score(double half_width, double tau) {
  if (half_width <= 0) return 1.0;
  return tau / (tau + half_width);
}

Band band_for(double confidence) {
  if (confidence >= kGreenThreshold) return Band::Green;
  if (confidence >= kAmberThreshold) return Band::Amber;
  return Band::Red;
}

}  // namespace patentlens::model
