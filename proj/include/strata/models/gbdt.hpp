#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/models/model.hpp"

namespace strata {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double predict_row(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
      i = x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                              : nodes[i].right;
    }
    return nodes[i].value;
  }
};

/// Single-output gradient-boosted trees for squared error: prediction is
/// mean(y) plus learning_rate times the sum of tree outputs.
class GbdtModel : public TrainedModel {
public:
  GbdtModel(std::size_t n_features, double base, double learning_rate,
            std::vector<RegressionTree> trees, TrainingReport report)
      : n_features_(n_features), base_(base), learning_rate_(learning_rate),
        trees_(std::move(trees)) {
    report_ = std::move(report);
  }

  ModelKind kind() const override { return ModelKind::Gbdt; }
  std::size_t n_features() const override { return n_features_; }
  std::size_t n_outputs() const override { return 1; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  double base() const { return base_; }

  Matrix predict(const Matrix& X) const override {
    check_features(X);
    Matrix out(X.rows, 1);
    for (std::size_t r = 0; r < X.rows; ++r) {
      double acc = base_;
      for (const auto& tree : trees_) acc += learning_rate_ * tree.predict_row(X.row(r));
      out.at(r, 0) = acc;
    }
    return out;
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "gbdt";
    j["n_features"] = n_features_;
    j["base"] = base_;
    j["learning_rate"] = learning_rate_;
    j["stopped_at"] = report_.stopped_at;
    j["trees"] = nlohmann::json::array();
    for (const auto& tree : trees_) {
      nlohmann::json t;
      for (const auto& n : tree.nodes) {
        t["feature"].push_back(n.feature);
        t["threshold"].push_back(n.threshold);
        t["left"].push_back(n.left);
        t["right"].push_back(n.right);
        t["value"].push_back(n.value);
      }
      j["trees"].push_back(std::move(t));
    }
    return j;
  }

  static ModelPtr from_json(const nlohmann::json& j) {
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) {
      RegressionTree tree;
      const auto& feature = t.at("feature");
      for (std::size_t i = 0; i < feature.size(); ++i) {
        TreeNode n;
        n.feature = t.at("feature")[i].get<int>();
        n.threshold = t.at("threshold")[i].get<double>();
        n.left = t.at("left")[i].get<int>();
        n.right = t.at("right")[i].get<int>();
        n.value = t.at("value")[i].get<double>();
        tree.nodes.push_back(n);
      }
      trees.push_back(std::move(tree));
    }
    TrainingReport report;
    report.stopped_at = j.at("stopped_at").get<int>();
    return std::make_unique<GbdtModel>(j.at("n_features").get<std::size_t>(),
                                       j.at("base").get<double>(),
                                       j.at("learning_rate").get<double>(), std::move(trees),
                                       std::move(report));
  }

private:
  std::size_t n_features_;
  double base_;
  double learning_rate_;
  std::vector<RegressionTree> trees_;
};

namespace detail {

/// Argsort of every feature column, computed once per design matrix and
/// shared by all trees (and all output columns). Ties keep row order, so
/// the build is deterministic.
inline std::vector<std::vector<int>> presort_features(const Matrix& X) {
  std::vector<std::vector<int>> sorted(X.cols);
  for (std::size_t f = 0; f < X.cols; ++f) {
    auto& idx = sorted[f];
    idx.resize(X.rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return X.at(static_cast<std::size_t>(a), f) < X.at(static_cast<std::size_t>(b), f);
    });
  }
  return sorted;
}

/// Grows one tree on the residuals, level by level. Each level scans every
/// feature once in presorted order, accumulating per-node prefix sums, so a
/// level costs O(features x samples). Splits maximize the squared-error gain
/// sum_l^2/n_l + sum_r^2/n_r - sum^2/n; leaves hold mean residuals.
inline RegressionTree build_tree(const Matrix& X, const std::vector<double>& residual,
                                 const std::vector<std::vector<int>>& sorted_idx, int max_depth,
                                 int min_samples_leaf) {
  const std::size_t n = X.rows;
  RegressionTree tree;
  std::vector<int> node_of(n, 0);

  double root_sum = 0.0;
  for (double r : residual) root_sum += r;
  tree.nodes.push_back(TreeNode{});
  std::vector<double> node_sum = {root_sum};
  std::vector<std::size_t> node_count = {n};
  std::vector<int> frontier = {0};

  struct Candidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    std::vector<char> in_frontier(tree.nodes.size(), 0);
    for (int id : frontier) {
      if (node_count[static_cast<std::size_t>(id)] >=
          2 * static_cast<std::size_t>(min_samples_leaf)) {
        in_frontier[static_cast<std::size_t>(id)] = 1;
      }
    }

    std::vector<Candidate> best(tree.nodes.size());
    std::vector<double> left_sum(tree.nodes.size(), 0.0);
    std::vector<std::size_t> left_count(tree.nodes.size(), 0);
    std::vector<double> prev_value(tree.nodes.size(), 0.0);

    for (std::size_t f = 0; f < X.cols; ++f) {
      for (int id : frontier) {
        const auto uid = static_cast<std::size_t>(id);
        left_sum[uid] = 0.0;
        left_count[uid] = 0;
      }
      for (int i : sorted_idx[f]) {
        const auto ui = static_cast<std::size_t>(i);
        const int id = node_of[ui];
        const auto uid = static_cast<std::size_t>(id);
        if (!in_frontier[uid]) continue;
        const double v = X.at(ui, f);
        if (left_count[uid] > 0 && v > prev_value[uid]) {
          const std::size_t lc = left_count[uid];
          const std::size_t rc = node_count[uid] - lc;
          if (lc >= static_cast<std::size_t>(min_samples_leaf) &&
              rc >= static_cast<std::size_t>(min_samples_leaf)) {
            const double ls = left_sum[uid];
            const double rs = node_sum[uid] - ls;
            const double gain = ls * ls / static_cast<double>(lc) +
                                rs * rs / static_cast<double>(rc) -
                                node_sum[uid] * node_sum[uid] / static_cast<double>(node_count[uid]);
            if (gain > best[uid].gain + 1e-12) {
              best[uid] = Candidate{gain, static_cast<int>(f), (prev_value[uid] + v) / 2.0};
            }
          }
        }
        left_sum[uid] += residual[ui];
        left_count[uid] += 1;
        prev_value[uid] = v;
      }
    }

    // Materialize the chosen splits, then route samples to the children.
    std::vector<int> next_frontier;
    for (int id : frontier) {
      const auto uid = static_cast<std::size_t>(id);
      if (!in_frontier[uid] || best[uid].feature < 0) continue;
      tree.nodes[uid].feature = best[uid].feature;
      tree.nodes[uid].threshold = best[uid].threshold;
      tree.nodes[uid].left = static_cast<int>(tree.nodes.size());
      tree.nodes[uid].right = static_cast<int>(tree.nodes.size()) + 1;
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      node_sum.resize(tree.nodes.size(), 0.0);
      node_count.resize(tree.nodes.size(), 0);
      next_frontier.push_back(tree.nodes[uid].left);
      next_frontier.push_back(tree.nodes[uid].right);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int id = node_of[i];
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(id)];
      if (nd.is_leaf()) continue;
      const int child =
          X.at(i, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left : nd.right;
      node_of[i] = child;
      node_sum[static_cast<std::size_t>(child)] += residual[i];
      node_count[static_cast<std::size_t>(child)] += 1;
    }
    frontier = std::move(next_frontier);
  }

  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].is_leaf() && node_count[id] > 0) {
      tree.nodes[id].value = node_sum[id] / static_cast<double>(node_count[id]);
    }
  }
  return tree;
}

inline double mse_of(std::span<const double> pred, std::span<const double> truth) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    acc += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  }
  return pred.empty() ? 0.0 : acc / static_cast<double>(pred.size());
}

inline ModelPtr fit_gbdt_presorted(const Matrix& X, std::span<const double> y,
                                   const ModelSpec& spec,
                                   const std::vector<std::vector<int>>& sorted_idx,
                                   const Matrix* Xv, std::span<const double> yv) {
  double base = 0.0;
  for (double v : y) base += v;
  base /= static_cast<double>(y.size());

  std::vector<double> fit(y.size(), base);
  std::vector<double> residual(y.size());
  std::vector<double> fit_valid(Xv != nullptr ? Xv->rows : 0, base);

  TrainingReport report;
  std::vector<RegressionTree> trees;
  const bool early = Xv != nullptr && spec.early_stopping_rounds > 0;
  double best_valid = std::numeric_limits<double>::infinity();
  int best_round = -1;

  for (int round = 0; round < spec.n_trees; ++round) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - fit[i];
    RegressionTree tree =
        build_tree(X, residual, sorted_idx, spec.max_depth, spec.min_samples_leaf);
    for (std::size_t i = 0; i < y.size(); ++i) {
      fit[i] += spec.learning_rate * tree.predict_row(X.row(i));
    }
    report.train_loss.push_back(mse_of(fit, y));
    if (Xv != nullptr) {
      for (std::size_t i = 0; i < fit_valid.size(); ++i) {
        fit_valid[i] += spec.learning_rate * tree.predict_row(Xv->row(i));
      }
      report.valid_loss.push_back(mse_of(fit_valid, yv));
    }
    trees.push_back(std::move(tree));

    if (early) {
      if (report.valid_loss.back() < best_valid) {
        best_valid = report.valid_loss.back();
        best_round = round;
      } else if (round - best_round >= spec.early_stopping_rounds) {
        break;
      }
    }
  }

  if (early && best_round >= 0) {
    trees.resize(static_cast<std::size_t>(best_round) + 1);
  }
  report.stopped_at = static_cast<int>(trees.size());
  return std::make_unique<GbdtModel>(X.cols, base, spec.learning_rate, std::move(trees),
                                     std::move(report));
}

}  // namespace detail

/// Fits a single-output boosted ensemble. When a validation set is given and
/// early_stopping_rounds > 0, training stops once validation MSE has not
/// improved for that many rounds and the ensemble is cut back to the best
/// round. Loss curves cover every round actually trained.
inline ModelPtr fit_gbdt(const Matrix& X, std::span<const double> y, const ModelSpec& spec,
                         const Matrix* Xv = nullptr, std::span<const double> yv = {}) {
  spec.validate();
  require(spec.kind == ModelKind::Gbdt, ErrCode::ConstraintError, "fit_gbdt needs a gbdt spec");
  require(X.rows == y.size(), ErrCode::DimensionMismatch,
          "X has " + std::to_string(X.rows) + " rows, y has " + std::to_string(y.size()));
  require(X.rows >= 2 * static_cast<std::size_t>(spec.min_samples_leaf), ErrCode::TooFewSamples,
          "gbdt needs >= 2*min_samples_leaf = " + std::to_string(2 * spec.min_samples_leaf) +
              " samples, got " + std::to_string(X.rows));
  if (Xv != nullptr) {
    require(Xv->rows == yv.size(), ErrCode::DimensionMismatch,
            "validation X and y row counts differ");
    require(Xv->cols == X.cols, ErrCode::DimensionMismatch,
            "validation features must match training features");
  }
  const auto sorted_idx = detail::presort_features(X);
  return detail::fit_gbdt_presorted(X, y, spec, sorted_idx, Xv, yv);
}

/// Multi-output boosting: one independent ensemble per target column,
/// sharing the presorted feature index.
inline ModelPtr fit_gbdt_multi(const Matrix& X, const Matrix& Y, const ModelSpec& spec,
                               const Matrix* Xv = nullptr, const Matrix* Yv = nullptr) {
  spec.validate();
  require(Y.cols >= 1, ErrCode::DimensionMismatch, "gbdt needs >= 1 target column");
  require(X.rows == Y.rows, ErrCode::DimensionMismatch,
          "X has " + std::to_string(X.rows) + " rows, Y has " + std::to_string(Y.rows));
  require(X.rows >= 2 * static_cast<std::size_t>(spec.min_samples_leaf), ErrCode::TooFewSamples,
          "gbdt needs >= 2*min_samples_leaf = " + std::to_string(2 * spec.min_samples_leaf) +
              " samples, got " + std::to_string(X.rows));
  const auto sorted_idx = detail::presort_features(X);

  std::vector<double> column(X.rows);
  std::vector<double> column_valid(Xv != nullptr ? Xv->rows : 0);
  std::vector<ModelPtr> ensembles;
  for (std::size_t j = 0; j < Y.cols; ++j) {
    for (std::size_t r = 0; r < Y.rows; ++r) column[r] = Y.at(r, j);
    if (Yv != nullptr) {
      for (std::size_t r = 0; r < Yv->rows; ++r) column_valid[r] = Yv->at(r, j);
    }
    const Matrix* xv = Yv != nullptr ? Xv : nullptr;
    ensembles.push_back(detail::fit_gbdt_presorted(
        X, column, spec, sorted_idx, xv,
        xv != nullptr ? std::span<const double>(column_valid) : std::span<const double>{}));
  }
  if (ensembles.size() == 1) return std::move(ensembles.front());
  return std::make_unique<ColumnStackModel>(ModelKind::Gbdt, std::move(ensembles));
}

}  // namespace strata
