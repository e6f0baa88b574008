#include "interp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace interp {

std::vector<std::string> top_n(const InterpretationList& list, std::size_t n) {
  if (n < 1 || n > list.ordered_features.size())
    throw std::invalid_argument("top_n: n = " + std::to_string(n) + " out of range 1.." +
                                std::to_string(list.ordered_features.size()));
  return {list.ordered_features.begin(),
          list.ordered_features.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::string> correlation_select(const Dataset& ds, std::size_t n) {
  if (n < 1 || n > ds.n_features())
    throw std::invalid_argument("correlation_select: n = " + std::to_string(n) +
                                " out of range 1.." + std::to_string(ds.n_features()));
  const std::vector<double> corr = pearson_correlation(ds);
  std::vector<std::size_t> order(ds.n_features());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = std::abs(corr[a]), kb = std::abs(corr[b]);
    if (ka != kb) return ka > kb;
    return a < b;
  });
  std::vector<std::string> selected;
  selected.reserve(n);
  for (std::size_t k = 0; k < n; ++k) selected.push_back(ds.feature_names[order[k]]);
  return selected;
}

Dataset project(const Dataset& ds, const std::vector<std::string>& features) {
  if (features.empty()) throw std::invalid_argument("projection onto an empty feature set");
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < ds.n_features(); ++j) position[ds.feature_names[j]] = j;
  std::vector<std::size_t> cols;
  cols.reserve(features.size());
  std::vector<int> used(ds.n_features(), 0);
  for (const std::string& f : features) {
    const auto it = position.find(f);
    if (it == position.end()) throw std::invalid_argument("unknown feature '" + f + "'");
    if (used[it->second]++) throw std::invalid_argument("duplicate feature '" + f + "'");
    cols.push_back(it->second);
  }
  Dataset out;
  out.feature_names = features;
  out.class_names = ds.class_names;
  out.targets = ds.targets;
  out.rows.resize(ds.n_samples(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < ds.n_samples(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.rows[i][j] = ds.rows[i][cols[j]];
  return out;
}

SelectionReport retrain_compare(const Dataset& ds, const std::vector<NamedSubset>& subsets,
                                const std::vector<ModelSpec>& specs, double test_fraction,
                                std::uint64_t seed) {
  if (subsets.empty()) throw std::invalid_argument("retrain_compare needs at least one subset");
  for (const NamedSubset& s : subsets)
    if (s.features.empty())
      throw std::invalid_argument("subset '" + s.method + "' is empty");

  // one split, shared by every (spec, subset) cell for fairness
  const auto [train_idx, test_idx] = split_indices(ds, test_fraction, seed);
  const Dataset train_full = take_rows(ds, train_idx);
  const Dataset test_full = take_rows(ds, test_idx);

  std::vector<NamedSubset> all_subsets = subsets;
  bool has_all = false;
  for (const NamedSubset& s : subsets)
    has_all = has_all || (s.method == "all" && s.features == ds.feature_names);
  if (!has_all) all_subsets.push_back({"all", ds.feature_names});

  SelectionReport report;
  report.seed = seed;
  report.test_fraction = test_fraction;
  report.train_size = train_idx.size();
  report.test_size = test_idx.size();

  for (const ModelSpec& spec : specs) {
    for (const NamedSubset& subset : all_subsets) {
      const Dataset train_ds = project(train_full, subset.features);
      const Dataset test_ds = project(test_full, subset.features);
      const Model model = train(train_ds, spec);
      SelectionCell cell;
      cell.model_kind = to_string(spec.kind);
      cell.method = subset.method;
      cell.n_kept = subset.features.size();
      cell.test_accuracy = accuracy(model, test_ds);
      cell.features = subset.features;
      report.cells.push_back(std::move(cell));
    }
  }
  std::sort(report.cells.begin(), report.cells.end(),
            [](const SelectionCell& a, const SelectionCell& b) {
              if (a.model_kind != b.model_kind) return a.model_kind < b.model_kind;
              if (a.method != b.method) return a.method < b.method;
              return a.n_kept < b.n_kept;
            });
  return report;
}

}  // namespace interp
