#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "interp/rng.hpp"

namespace interp {

/// CART-style axis-aligned split tree. Nodes live in a flat vector; a node
/// is a leaf iff feature < 0. Thresholds are midpoints between consecutive
/// distinct values; candidate scan order is (feature index, threshold)
/// ascending with strict improvement, which makes training independent of
/// the order of the input rows.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution, or {prediction} for regression
  double impurity = 0.0;
  std::size_t n_samples = 0;
};

class ClassificationTree {
 public:
  /// Trains on the rows named by `indices` (duplicates allowed, e.g. from a
  /// bootstrap). When `rng` is non-null, each node considers only `mtry`
  /// features sampled from it. max_depth >= 1.
  void train(const std::vector<std::vector<double>>& data, const std::vector<int>& targets,
             std::size_t n_classes, const std::vector<std::size_t>& indices, int max_depth,
             std::size_t mtry = 0, Substream* rng = nullptr);

  const std::vector<double>& predict_dist(std::span<const double> row) const;
  int predict_class(std::span<const double> row) const;

  /// Total Gini impurity decrease attributed to splits on each feature,
  /// weighted by the fraction of samples reaching the split.
  std::vector<double> impurity_importance(std::size_t n_features) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  void set_nodes(std::vector<TreeNode> nodes) { nodes_ = std::move(nodes); }
  bool has_split() const { return !nodes_.empty() && nodes_[0].feature >= 0; }

 private:
  std::vector<TreeNode> nodes_;
};

/// Squared-error regression tree used by the boosting ensemble. Leaves keep
/// the index list of training rows so the booster can re-estimate leaf
/// values from its own objective.
class RegressionTree {
 public:
  void train(const std::vector<std::vector<double>>& data, const std::vector<double>& response,
             const std::vector<std::size_t>& indices, int max_depth);

  double predict(std::span<const double> row) const;
  int leaf_index(std::span<const double> row) const;

  std::vector<TreeNode>& nodes() { return nodes_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<std::vector<std::size_t>>& leaf_members() const { return leaf_members_; }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<std::size_t>> leaf_members_;  // by node index
};

}  // namespace interp
