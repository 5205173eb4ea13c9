#include "patentlens/model/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patentlens/error.hpp"

namespace patentlens::model {

namespace {

// Column-sorted non-zero entries (CSC with values ascending within a column).
struct SortedColumns {
  std::vector<std::size_t> start;
  std::vector<int> row;
  std::vector<double> value;

  explicit SortedColumns(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    start.reserve(static_cast<std::size_t>(X.cols()) + 1);
    std::vector<std::pair<double, int>> col;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      start.push_back(row.size());
      col.clear();
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (X(i, j) != 0.0) col.emplace_back(X(i, j), static_cast<int>(i));
      }
      std::sort(col.begin(), col.end());
      for (const auto& [v, r] : col) {
        value.push_back(v);
        row.push_back(r);
      }
    }
    start.push_back(row.size());
  }
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2;
  return (mid < hi) ? mid : lo;
}

class TreeBuilder {
 public:
  TreeBuilder(const SortedColumns& cols, Eigen::Index n_features, const BoostingParams& params)
      : cols_(cols), n_features_(n_features), params_(params) {}

  // Fits one tree to `residual`; `leaf_of` receives each row's leaf node.
  RegressionTree fit(const Eigen::VectorXd& residual, std::vector<int>& leaf_of) {
    const auto n = static_cast<std::size_t>(residual.size());
    RegressionTree tree;
    node_of_.assign(n, 0);
    goes_left_.assign(n, 0);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    grow(tree, residual, std::move(all), 0);
    leaf_of = node_of_;
    return tree;
  }

 private:
  void grow(RegressionTree& tree, const Eigen::VectorXd& r, std::vector<int> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    for (int i : rows) node_of_[static_cast<std::size_t>(i)] = id;

    double sum = 0;
    for (int i : rows) sum += r[i];
    const double mean = sum / static_cast<double>(rows.size());

    SplitChoice best;
    if (depth < params_.max_depth && rows.size() >= 2 * params_.min_leaf && rows.size() >= 2) {
      best = find_split(r, rows, id, sum);
    }
    if (best.feature < 0) {
      tree.nodes[static_cast<std::size_t>(id)].leaf_value = mean;
      return;
    }
    const bool zero_goes_left = 0.0 <= best.threshold;
    for (int i : rows) goes_left_[static_cast<std::size_t>(i)] = zero_goes_left;
    const auto b = cols_.start[static_cast<std::size_t>(best.feature)];
    const auto e = cols_.start[static_cast<std::size_t>(best.feature) + 1];
    for (auto k = b; k < e; ++k) {
      const int i = cols_.row[k];
      if (node_of_[static_cast<std::size_t>(i)] == id) goes_left_[static_cast<std::size_t>(i)] = cols_.value[k] <= best.threshold;
    }
    std::vector<int> left, right;
    for (int i : rows) (goes_left_[static_cast<std::size_t>(i)] ? left : right).push_back(i);
    rows.clear();
    rows.shrink_to_fit();
    tree.nodes[static_cast<std::size_t>(id)].feature = best.feature;
    tree.nodes[static_cast<std::size_t>(id)].threshold = best.threshold;
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    grow(tree, r, std::move(left), depth + 1);
    const int rr = static_cast<int>(tree.nodes.size());
    tree.nodes[static_cast<std::size_t>(id)].right = rr;
    grow(tree, r, std::move(right), depth + 1);
  }

  SplitChoice find_split(const Eigen::VectorXd& r, const std::vector<int>& rows, int node, double sum) {
    const double m = static_cast<double>(rows.size());
    double sum_sq = 0;
    for (int i : rows) sum_sq += r[i] * r[i];
    // Gains within this band of the incumbent are treated as ties so that
    // summation order cannot change which split wins.
    const double tol = 1e-12 * std::max(1.0, sum_sq);
    const double parent = sum * sum / m;
    const auto min_leaf = static_cast<double>(std::max<std::size_t>(params_.min_leaf, 1));

    SplitChoice best;
    best.gain = tol;
    for (Eigen::Index j = 0; j < n_features_; ++j) {
      entries_.clear();
      double nz_sum = 0;
      const auto b = cols_.start[static_cast<std::size_t>(j)];
      const auto e = cols_.start[static_cast<std::size_t>(j) + 1];
      for (auto k = b; k < e; ++k) {
        const int i = cols_.row[k];
        if (node_of_[static_cast<std::size_t>(i)] != node) continue;
        entries_.push_back({cols_.value[k], r[i]});
        nz_sum += r[i];
      }
      const double zero_count = m - static_cast<double>(entries_.size());
      const double zero_sum = sum - nz_sum;

      double left_n = 0, left_sum = 0;
      bool have_prev = false;
      double prev = 0;
      auto boundary = [&](double next) {
        if (!have_prev || next == prev) return;
        const double right_n = m - left_n;
        if (left_n < min_leaf || right_n < min_leaf) return;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / left_n + right_sum * right_sum / right_n - parent;
        if (gain > best.gain + tol || (best.feature < 0 && gain > best.gain)) {
          best = {static_cast<int>(j), midpoint(prev, next), gain};
        }
      };
      std::size_t k = 0;
      for (; k < entries_.size() && entries_[k].value < 0; ++k) {
        boundary(entries_[k].value);
        left_n += 1;
        left_sum += entries_[k].residual;
        prev = entries_[k].value;
        have_prev = true;
      }
      if (zero_count > 0) {
        boundary(0.0);
        left_n += zero_count;
        left_sum += zero_sum;
        prev = 0.0;
        have_prev = true;
      }
      for (; k < entries_.size(); ++k) {
        boundary(entries_[k].value);
        left_n += 1;
        left_sum += entries_[k].residual;
        prev = entries_[k].value;
        have_prev = true;
      }
    }
    return best;
  }

  struct Entry {
    double value;
    double residual;
  };

  const SortedColumns& cols_;
  Eigen::Index n_features_;
  BoostingParams params_;
  std::vector<int> node_of_;
  std::vector<char> goes_left_;
  std::vector<Entry> entries_;
};

double rmse(const Eigen::VectorXd& residual) { return std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size())); }

}  // namespace

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
    d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

BoostedTreesModel train_boosted_trees(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, const BoostingParams& params) {
  if (X.rows() != y.size()) fail(Errc::invalid_argument, "X and y row counts differ");
  if (params.max_depth < 1 || params.rounds < 0 || params.min_leaf < 1) {
    fail(Errc::invalid_argument, "invalid boosting parameters");
  }
  if (!(params.learning_rate > 0 && params.learning_rate <= 1)) {
    fail(Errc::invalid_argument, "learning_rate must be in (0, 1]");
  }
  if (static_cast<std::size_t>(X.rows()) < 2 * params.min_leaf || X.rows() < 2) {
    fail(Errc::insufficient_data, "boosting needs at least 2 * min_leaf rows");
  }
  if (!X.allFinite() || !y.allFinite()) fail(Errc::invalid_argument, "non-finite training data");

  BoostedTreesModel m;
  m.params = params;
  m.learning_rate = params.learning_rate;
  m.feature_dim = X.cols();
  const bool constant = (y.array() == y[0]).all();
  m.initial_prediction = constant ? y[0] : y.mean();

  Eigen::VectorXd residual = y.array() - m.initial_prediction;
  m.training_rmse.push_back(rmse(residual));
  if (constant) return m;

  const SortedColumns cols(X);
  TreeBuilder builder(cols, X.cols(), params);
  std::vector<int> leaf_of;
  for (int round = 0; round < params.rounds; ++round) {
    RegressionTree tree = builder.fit(residual, leaf_of);
    if (tree.nodes.size() == 1) break;
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
      residual[i] -= params.learning_rate * tree.nodes[static_cast<std::size_t>(leaf_of[static_cast<std::size_t>(i)])].leaf_value;
    }
    m.trees.push_back(std::move(tree));
    m.training_rmse.push_back(rmse(residual));
  }
  return m;
}

}  // namespace patentlens::model
