#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace patentlens::model {

/// Flat node array; node 0 is the root. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double leaf_value = 0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  template <class Row>
  double predict(const Row& x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].leaf_value;
  }

  int depth() const;
};

struct BoostingParams {
  int max_depth = 3;
  int rounds = 200;
  std::size_t min_leaf = 20;
  double learning_rate = 0.1;
};

struct BoostedTreesModel {
  double initial_prediction = 0;
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  BoostingParams params;
  Eigen::Index feature_dim = 0;
  /// Training RMSE before any tree (index 0) and after each round.
  std::vector<double> training_rmse;

  template <class Row>
  double predict_row(const Row& x) const {
    double f = initial_prediction;
    for (const auto& t : trees) f += learning_rate * t.predict(x);
    return f;
  }
};

/// Squared-loss gradient boosting with exact greedy regression trees. Each node
/// takes the variance-reduction-maximizing split among midpoints of sorted
/// distinct feature values; ties go to the lowest feature index, then the
/// lowest threshold. Zero entries are scanned as one block, so sparse hashed
/// columns cost only their non-zeros. Training stops early once the root can
/// no longer be split (e.g. constant targets give zero trees).
BoostedTreesModel train_boosted_trees(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, const BoostingParams& params = {});

template <class Derived>
Eigen::VectorXd predict(const BoostedTreesModel& m, const Eigen::MatrixBase<Derived>& X) {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = m.predict_row(X.row(i));
  return out;
}

}  // namespace patentlens::model
