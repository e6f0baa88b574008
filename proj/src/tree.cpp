#include "interp/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace interp {

namespace {

double gini_from_counts(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

std::vector<std::size_t> sample_features(std::size_t n_features, std::size_t mtry,
                                         Substream& rng) {
  std::vector<std::size_t> all(n_features);
  for (std::size_t j = 0; j < n_features; ++j) all[j] = j;
  for (std::size_t k = 0; k < mtry; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.next_below(n_features - k));
    std::swap(all[k], all[j]);
  }
  all.resize(mtry);
  std::sort(all.begin(), all.end());  // scan in ascending feature order
  return all;
}

}  // namespace

void ClassificationTree::train(const std::vector<std::vector<double>>& data,
                               const std::vector<int>& targets, std::size_t n_classes,
                               const std::vector<std::size_t>& indices, int max_depth,
                               std::size_t mtry, Substream* rng) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (indices.empty()) throw std::invalid_argument("tree training set is empty");
  const std::size_t n_features = data[0].size();
  if (mtry == 0 || mtry > n_features) mtry = n_features;

  nodes_.clear();

  struct Work {
    int node;
    std::vector<std::size_t> members;
    int depth;
  };

  auto make_node = [&](const std::vector<std::size_t>& members) {
    TreeNode node;
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t i : members) ++counts[static_cast<std::size_t>(targets[i])];
    node.n_samples = members.size();
    node.impurity = gini_from_counts(counts, members.size());
    node.value.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
      node.value[c] = static_cast<double>(counts[c]) / static_cast<double>(members.size());
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size() - 1);
  };

  std::vector<Work> stack;
  stack.push_back({make_node(indices), indices, 0});

  // (value, class) pairs sorted canonically so results depend only on the
  // multiset of rows, not their order.
  std::vector<std::pair<double, int>> sorted;

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    TreeNode& node = nodes_[static_cast<std::size_t>(work.node)];
    const std::size_t n = work.members.size();

    if (work.depth >= max_depth || node.impurity <= 0.0 || n < 2) continue;

    std::vector<std::size_t> features;
    if (rng != nullptr && mtry < n_features)
      features = sample_features(n_features, mtry, *rng);
    else {
      features.resize(n_features);
      for (std::size_t j = 0; j < n_features; ++j) features[j] = j;
    }

    BestSplit best;
    std::vector<std::size_t> left_counts(n_classes), total_counts(n_classes, 0);
    for (std::size_t i : work.members) ++total_counts[static_cast<std::size_t>(targets[i])];

    for (std::size_t f : features) {
      sorted.clear();
      sorted.reserve(n);
      for (std::size_t i : work.members)
        sorted.emplace_back(data[i][f], targets[i]);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::size_t n_left = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left_counts[static_cast<std::size_t>(sorted[k].second)];
        ++n_left;
        if (sorted[k].first == sorted[k + 1].first) continue;
        const double threshold = sorted[k].first + (sorted[k + 1].first - sorted[k].first) / 2.0;
        double gini_left = 0.0, gini_right = 0.0, sum_l = 0.0, sum_r = 0.0;
        const std::size_t n_right = n - n_left;
        for (std::size_t c = 0; c < n_classes; ++c) {
          const double pl = static_cast<double>(left_counts[c]) / static_cast<double>(n_left);
          const double pr = static_cast<double>(total_counts[c] - left_counts[c]) /
                            static_cast<double>(n_right);
          sum_l += pl * pl;
          sum_r += pr * pr;
        }
        gini_left = 1.0 - sum_l;
        gini_right = 1.0 - sum_r;
        const double weighted =
            (static_cast<double>(n_left) * gini_left + static_cast<double>(n_right) * gini_right) /
            static_cast<double>(n);
        const double gain = node.impurity - weighted;
        if (gain > best.gain + 1e-15) {
          best.feature = static_cast<int>(f);
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }

    if (best.feature < 0) continue;

    std::vector<std::size_t> left_members, right_members;
    for (std::size_t i : work.members) {
      if (data[i][static_cast<std::size_t>(best.feature)] <= best.threshold)
        left_members.push_back(i);
      else
        right_members.push_back(i);
    }
    if (left_members.empty() || right_members.empty()) continue;

    const int left = make_node(left_members);
    const int right = make_node(right_members);
    TreeNode& parent = nodes_[static_cast<std::size_t>(work.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left;
    parent.right = right;
    stack.push_back({right, std::move(right_members), work.depth + 1});
    stack.push_back({left, std::move(left_members), work.depth + 1});
  }
}

const std::vector<double>& ClassificationTree::predict_dist(std::span<const double> row) const {
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& cur = nodes_[static_cast<std::size_t>(node)];
    node = (row[static_cast<std::size_t>(cur.feature)] <= cur.threshold) ? cur.left : cur.right;
  }
  return nodes_[static_cast<std::size_t>(node)].value;
}

int ClassificationTree::predict_class(std::span<const double> row) const {
  const std::vector<double>& dist = predict_dist(row);
  std::size_t best = 0;
  for (std::size_t c = 1; c < dist.size(); ++c)
    if (dist[c] > dist[best]) best = c;  // ties keep the lowest class index
  return static_cast<int>(best);
}

std::vector<double> ClassificationTree::impurity_importance(std::size_t n_features) const {
  std::vector<double> importance(n_features, 0.0);
  if (nodes_.empty()) return importance;
  const double n_root = static_cast<double>(nodes_[0].n_samples);
  for (const TreeNode& node : nodes_) {
    if (node.feature < 0) continue;
    const TreeNode& l = nodes_[static_cast<std::size_t>(node.left)];
    const TreeNode& r = nodes_[static_cast<std::size_t>(node.right)];
    const double n = static_cast<double>(node.n_samples);
    const double decrease =
        node.impurity - (static_cast<double>(l.n_samples) * l.impurity +
                         static_cast<double>(r.n_samples) * r.impurity) /
                            n;
    importance[static_cast<std::size_t>(node.feature)] += (n / n_root) * decrease;
  }
  return importance;
}

void RegressionTree::train(const std::vector<std::vector<double>>& data,
                           const std::vector<double>& response,
                           const std::vector<std::size_t>& indices, int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (indices.empty()) throw std::invalid_argument("tree training set is empty");
  const std::size_t n_features = data[0].size();

  nodes_.clear();
  leaf_members_.clear();

  struct Work {
    int node;
    std::vector<std::size_t> members;
    int depth;
  };

  auto make_node = [&](const std::vector<std::size_t>& members) {
    TreeNode node;
    double sum = 0.0;
    for (std::size_t i : members) sum += response[i];
    node.n_samples = members.size();
    node.value = {sum / static_cast<double>(members.size())};
    nodes_.push_back(std::move(node));
    leaf_members_.push_back(members);
    return static_cast<int>(nodes_.size() - 1);
  };

  std::vector<Work> stack;
  stack.push_back({make_node(indices), indices, 0});

  std::vector<std::pair<double, double>> sorted;  // (feature value, response)

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    const std::size_t n = work.members.size();
    if (work.depth >= max_depth || n < 2) continue;

    double total = 0.0;
    for (std::size_t i : work.members) total += response[i];

    // maximize sum_l^2/n_l + sum_r^2/n_r (equivalent to variance reduction)
    double best_score = total * total / static_cast<double>(n);
    BestSplit best;
    for (std::size_t f = 0; f < n_features; ++f) {
      sorted.clear();
      sorted.reserve(n);
      for (std::size_t i : work.members) sorted.emplace_back(data[i][f], response[i]);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;
      double sum_l = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        sum_l += sorted[k].second;
        if (sorted[k].first == sorted[k + 1].first) continue;
        const double n_l = static_cast<double>(k + 1);
        const double n_r = static_cast<double>(n - k - 1);
        const double sum_r = total - sum_l;
        const double score = sum_l * sum_l / n_l + sum_r * sum_r / n_r;
        if (score > best_score + 1e-12) {
          best_score = score;
          best.feature = static_cast<int>(f);
          best.threshold = sorted[k].first + (sorted[k + 1].first - sorted[k].first) / 2.0;
        }
      }
    }

    if (best.feature < 0) continue;

    std::vector<std::size_t> left_members, right_members;
    for (std::size_t i : work.members) {
      if (data[i][static_cast<std::size_t>(best.feature)] <= best.threshold)
        left_members.push_back(i);
      else
        right_members.push_back(i);
    }
    if (left_members.empty() || right_members.empty()) continue;

    const int left = make_node(left_members);
    const int right = make_node(right_members);
    TreeNode& parent = nodes_[static_cast<std::size_t>(work.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left;
    parent.right = right;
    leaf_members_[static_cast<std::size_t>(work.node)].clear();
    stack.push_back({right, std::move(right_members), work.depth + 1});
    stack.push_back({left, std::move(left_members), work.depth + 1});
  }
}

double RegressionTree::predict(std::span<const double> row) const {
  return nodes_[static_cast<std::size_t>(leaf_index(row))].value[0];
}

int RegressionTree::leaf_index(std::span<const double> row) const {
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& cur = nodes_[static_cast<std::size_t>(node)];
    node = (row[static_cast<std::size_t>(cur.feature)] <= cur.threshold) ? cur.left : cur.right;
  }
  return node;
}

}  // namespace interp
