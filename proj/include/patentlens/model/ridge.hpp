#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "patentlens/error.hpp"

namespace patentlens::model {

/// Linear model y ~ X w + b on the original feature scale.
template <class Scalar = double>
struct RidgeModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector weights;
  Scalar intercept{0};
  Scalar lambda{0};
};

/// Column statistics used to standardize features (population variance).
/// Columns whose spread is negligible relative to their mean are inactive and
/// keep a zero weight.
template <class Scalar>
struct Standardization {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scale;
  std::vector<Eigen::Index> active;
};

template <class Derived>
Standardization<typename Derived::Scalar> standardization_of(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  Standardization<Scalar> s;
  const auto n = static_cast<Scalar>(X.rows());
  s.mean = X.colwise().sum().transpose() / n;
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Scalar var = (X.col(j).array() - s.mean[j]).square().sum() / n;
    const Scalar sd = std::sqrt(var);
    s.scale[j] = sd;
    if (sd > Scalar(1e-12) * std::max(Scalar(1), std::abs(s.mean[j]))) s.active.push_back(j);
  }
  return s;
}

/// Minimizes ||y - Xw - b||^2 + lambda ||w||^2 over standardized features with
/// the intercept unpenalized, then folds the scaling back into w and b.
///
/// Uses the primal normal equations (Z'Z + lambda I) when there are no more
/// active columns than rows and the equivalent dual system (ZZ' + lambda I)
/// otherwise. At lambda = 0 a rank-deficient design is an error.
template <class DerivedX, class DerivedY>
RidgeModel<typename DerivedX::Scalar> train_ridge(const Eigen::MatrixBase<DerivedX>& X,
                                                  const Eigen::MatrixBase<DerivedY>& y,
                                                  typename DerivedX::Scalar lambda) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  if (X.rows() < 2) fail(Errc::insufficient_data, "ridge needs at least 2 rows");
  if (X.rows() != y.size()) fail(Errc::invalid_argument, "X and y row counts differ");
  if (!(lambda >= 0) || !std::isfinite(static_cast<double>(lambda))) {
    fail(Errc::invalid_argument, "lambda must be finite and non-negative");
  }

  const auto st = standardization_of(X);
  const auto n = X.rows();
  const auto k = static_cast<Eigen::Index>(st.active.size());
  const Scalar y_mean = y.sum() / static_cast<Scalar>(n);
  const Vector yc = y.array() - y_mean;

  Matrix Z(n, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto j = st.active[static_cast<std::size_t>(a)];
    Z.col(a) = (X.col(j).array() - st.mean[j]) / st.scale[j];
  }

  Vector beta = Vector::Zero(k);
  if (k > 0) {
    if (lambda == 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(Z);
      qr.setThreshold(Scalar(1e-10));
      if (qr.rank() < k) fail(Errc::numerical, "rank deficient; increase lambda");
    }
    if (k <= n) {
      Matrix gram = Z.transpose() * Z;
      gram.diagonal().array() += lambda;
      Eigen::LDLT<Matrix> ldlt(gram);
      if (ldlt.info() != Eigen::Success) fail(Errc::numerical, "rank deficient; increase lambda");
      beta = ldlt.solve(Z.transpose() * yc);
    } else {
      Matrix kernel = Z * Z.transpose();
      kernel.diagonal().array() += lambda;
      Eigen::LDLT<Matrix> ldlt(kernel);
      if (ldlt.info() != Eigen::Success) fail(Errc::numerical, "rank deficient; increase lambda");
      beta = Z.transpose() * ldlt.solve(yc);
    }
  }

  RidgeModel<Scalar> m;
  m.lambda = lambda;
  m.weights = Vector::Zero(X.cols());
  m.intercept = y_mean;
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto j = st.active[static_cast<std::size_t>(a)];
    m.weights[j] = beta[a] / st.scale[j];
    m.intercept -= m.weights[j] * st.mean[j];
  }
  if (!m.weights.allFinite() || !std::isfinite(static_cast<double>(m.intercept))) {
    fail(Errc::numerical, "ridge produced non-finite parameters");
  }
  return m;
}

template <class Scalar, class Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> predict(const RidgeModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X) {
  return (X * m.weights).array() + m.intercept;
}

}  // namespace patentlens::model
