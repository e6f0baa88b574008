#include "interp/evaluation.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace interp {

namespace {

void check_same_universe(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("universe mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + " features");
  std::vector<std::string> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) throw std::invalid_argument("universe mismatch: different feature sets");
}

}  // namespace

ReferenceLabel load_label(const std::string& path, std::vector<std::string> universe) {
  const std::vector<ParsedList> lists = load_lists(path, std::move(universe));
  ReferenceLabel label;
  label.ordered_features = lists.front().list.ordered_features;
  label.source_note = lists.front().list.provenance;
  return label;
}

double l_score(const InterpretationList& list, const ReferenceLabel& label) {
  check_same_universe(list.ordered_features, label.ordered_features);
  const std::size_t n = label.ordered_features.size();
  std::size_t matches = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (list.ordered_features[k] == label.ordered_features[k]) ++matches;
  return static_cast<double>(matches) / static_cast<double>(n);
}

std::vector<ScoreRow> score_table(const std::vector<InterpretationList>& lists,
                                  const ReferenceLabel& label) {
  std::vector<ScoreRow> rows, ensemble_rows;
  for (const InterpretationList& list : lists) {
    ScoreRow row{list.provenance, l_score(list, label)};
    (list.provenance == "ensemble" ? ensemble_rows : rows).push_back(std::move(row));
  }
  rows.insert(rows.end(), ensemble_rows.begin(), ensemble_rows.end());
  return rows;
}

long long kendall_tau_distance(const InterpretationList& a, const InterpretationList& b) {
  check_same_universe(a.ordered_features, b.ordered_features);
  const std::size_t n = a.ordered_features.size();
  std::unordered_map<std::string, std::size_t> rank_in_b;
  for (std::size_t k = 0; k < n; ++k) rank_in_b[b.ordered_features[k]] = k;
  std::vector<std::size_t> sequence(n);
  for (std::size_t k = 0; k < n; ++k) sequence[k] = rank_in_b.at(a.ordered_features[k]);
  long long discordant = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (sequence[i] > sequence[j]) ++discordant;
  return discordant;
}

namespace {

/// Mean Kendall distance over all unordered pairs; 0 when fewer than 2.
double mean_pairwise_distance(const std::vector<const InterpretationList*>& lists) {
  if (lists.size() < 2) return 0.0;
  long long total = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < lists.size(); ++i)
    for (std::size_t j = i + 1; j < lists.size(); ++j) {
      total += kendall_tau_distance(*lists[i], *lists[j]);
      ++pairs;
    }
  return static_cast<double>(total) / static_cast<double>(pairs);
}

}  // namespace

StabilityReport stability_report(const std::vector<std::vector<InterpretationList>>& base_runs,
                                 const std::vector<InterpretationList>& ensemble_per_run,
                                 const ReferenceLabel* label) {
  if (base_runs.size() < 2)
    throw std::invalid_argument("stability_report needs at least 2 runs");
  if (ensemble_per_run.size() != base_runs.size())
    throw std::invalid_argument("one ensemble list per run required");

  std::vector<const InterpretationList*> base_pool, ensemble_pool;
  for (const auto& run : base_runs)
    for (const auto& list : run) base_pool.push_back(&list);
  for (const auto& list : ensemble_per_run) ensemble_pool.push_back(&list);

  StabilityReport report;
  report.run_count = base_runs.size();
  report.base_dispersion = mean_pairwise_distance(base_pool);
  report.ensemble_dispersion = mean_pairwise_distance(ensemble_pool);
  if (label != nullptr) {
    double base_sum = 0.0;
    for (const auto* list : base_pool) base_sum += l_score(*list, *label);
    double ens_sum = 0.0;
    for (const auto* list : ensemble_pool) ens_sum += l_score(*list, *label);
    report.mean_base_l_score = base_sum / static_cast<double>(base_pool.size());
    report.mean_ensemble_l_score = ens_sum / static_cast<double>(ensemble_pool.size());
  }
  return report;
}

}  // namespace interp
