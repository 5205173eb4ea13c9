#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "patentlens/error.hpp"
#include "patentlens/model/conformal.hpp"

using namespace patentlens;
using namespace patentlens::model;

namespace {

// Smallest k with at least (n + 1)(1 - alpha) of n + 1 slots covered, by scanning.
std::size_t brute_force_rank(std::size_t n, double alpha) {
  for (std::size_t k = 1;; ++k) {
    if (static_cast<double>(k) / static_cast<double>(n + 1) >= (1.0 - alpha) - 1e-12) return k;
  }
}

RidgeModel<double> constant_model(Eigen::Index dim, double value) {
  RidgeModel<double> m;
  m.weights = Eigen::VectorXd::Zero(dim);
  m.intercept = value;
  return m;
}

}  // namespace

TEST_SUITE("conformal") {
  TEST_CASE("rank arithmetic matches a brute-force scan") {
    CHECK(conformal_rank(9, 0.1) == 9);
    CHECK(conformal_rank(20, 0.1) == 19);
    for (std::size_t n = 1; n < 600; n += 7) {
      for (double alpha : {0.05, 0.1, 0.2, 0.25, 0.5}) {
        CAPTURE(n);
        CAPTURE(alpha);
        CHECK(conformal_rank(n, alpha) == brute_force_rank(n, alpha));
      }
    }
  }

  TEST_CASE("calibration needs 20 rows") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(19, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Random(19);
    CHECK_THROWS_WITH(fit_conformal(constant_model(2, 0), X, y, 0.1), "insufficient calibration data");
    Eigen::MatrixXd X9 = Eigen::MatrixXd::Random(9, 2);
    Eigen::VectorXd y9 = Eigen::VectorXd::Random(9);
    CHECK_THROWS_WITH(fit_conformal(constant_model(2, 0), X9, y9, 0.1), "insufficient calibration data");
  }

  TEST_CASE("n = 20 picks the 19th smallest normalized score") {
    // Constant residual magnitudes make the difficulty model constant, so the
    // ordering of scores is the ordering of residuals.
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(20, 1);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y[i] = 100.0 + (i + 1);
    const auto c = fit_conformal(constant_model(1, 100.0), X, y, 0.1);
    const double d = std::max(1.0, 10.5);  // every prediction is the mean residual
    CHECK(c.q_hat == doctest::Approx(19.0 / d));
    CHECK(c.tau == doctest::Approx(19.0));
  }

  TEST_CASE("zero residuals give degenerate intervals") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(30, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 500.0);
    const auto point = constant_model(2, 500.0);
    const auto c = fit_conformal(point, X, y, 0.1);
    CHECK(c.q_hat == 0.0);
    const Eigen::VectorXd x = X.row(0).transpose();
    const auto r = predict_with_interval(point, c, x.transpose());
    CHECK(r.interval_low_days == r.point_days);
    CHECK(r.interval_high_days == r.point_days);
    CHECK(r.confidence == 1.0);
    CHECK(r.band == Band::Green);
  }

  TEST_CASE("confidence contract") {
    CHECK(confidence_score(0.0, 30.0) == 1.0);
    CHECK(confidence_score(30.0, 30.0) == 0.5);
    CHECK(band_for(0.6) == Band::Green);
    CHECK(band_for(std::nextafter(0.6, 0.0)) == Band::Amber);
    CHECK(band_for(0.4) == Band::Amber);
    CHECK(band_for(std::nextafter(0.4, 0.0)) == Band::Red);
    CHECK(band_for(0.5) == Band::Amber);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const double tau = 0.5 + u(rng);
      const double a = u(rng), b = u(rng);
      if (a == b) continue;
      const double lo = std::min(a, b), hi = std::max(a, b);
      CHECK(confidence_score(lo, tau) > confidence_score(hi, tau));
      const double s = confidence_score(hi, tau);
      CHECK(s > 0.0);
      CHECK(s <= 1.0);
      const double scale = 0.25 + u(rng) / 100.0;
      CHECK(band_for(confidence_score(lo * scale, tau * scale)) == band_for(confidence_score(lo, tau)));
    }
  }

  TEST_CASE("intervals stay ordered and non-negative") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0, 1);
    Eigen::MatrixXd X(200, 2);
    Eigen::VectorXd y(200);
    for (int i = 0; i < 200; ++i) {
      X(i, 0) = g(rng);
      X(i, 1) = std::abs(g(rng));
      y[i] = std::max(0.0, 20 + 5 * X(i, 0) + 15 * X(i, 1) * g(rng));
    }
    const PointModel point = train_ridge(X, y, 1.0);
    const auto c = fit_conformal(point, X, y, 0.1);
    CHECK(c.tau > 0);
    for (int i = 0; i < 200; ++i) {
      const auto r = predict_with_interval(point, c, X.row(i));
      CHECK(r.interval_low_days >= 0.0);
      CHECK(r.interval_low_days <= r.point_days);
      CHECK(r.point_days <= r.interval_high_days);
      CHECK(r.confidence > 0.0);
      CHECK(r.confidence <= 1.0);
    }
  }

  TEST_CASE("from 40 rows the scores come from rows the difficulty model did not see") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0, 1);
    for (const int n : {40, 41, 97, 300}) {
      Eigen::MatrixXd X(n, 2);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) {
        X(i, 0) = g(rng);
        X(i, 1) = g(rng);
        y[i] = 50 + 10 * X(i, 0) + 8 * std::abs(X(i, 1)) * g(rng);
      }
      const PointModel point = train_ridge(X, y, 1.0);
      const auto c = fit_conformal(point, X, y, 0.1);
      std::vector<double> scores, widths;
      for (int i = n / 2; i < n; ++i) {
        const double d = std::max(1.0, predict_row(c.difficulty_model, X.row(i)));
        scores.push_back(std::abs(y[i] - predict_row(point, X.row(i))) / d);
      }
      std::sort(scores.begin(), scores.end());
      const auto m = scores.size();
      const auto k = static_cast<std::size_t>(std::ceil((m + 1) * 0.9 - 1e-9));
      CHECK(c.q_hat == doctest::Approx(scores[k - 1]).epsilon(1e-12));
      for (int i = n / 2; i < n; ++i) widths.push_back(c.q_hat * std::max(1.0, predict_row(c.difficulty_model, X.row(i))));
      std::sort(widths.begin(), widths.end());
      const double median = m % 2 ? widths[m / 2] : 0.5 * (widths[m / 2 - 1] + widths[m / 2]);
      CHECK(c.tau == doctest::Approx(median).epsilon(1e-12));
    }
  }
}
