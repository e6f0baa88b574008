#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interp/listspace.hpp"

namespace interp {

/// Expert-provided ground-truth ordering used as the supervision signal.
struct ReferenceLabel {
  std::vector<std::string> ordered_features;
  std::string source_note;
};

/// Loads the first list of a list file as a reference label.
ReferenceLabel load_label(const std::string& path,
                          std::vector<std::string> universe = {});

/// Fraction of rank positions where the list names exactly the same feature
/// as the label. Exact rational value (count / n); note that (n-1)/n is
/// impossible for permutations.
double l_score(const InterpretationList& list, const ReferenceLabel& label);

struct ScoreRow {
  std::string name;
  double score = 0.0;
};

/// l_score of every list against the label, named by provenance. Rows keep
/// input order except that ensemble rows are moved to the end.
std::vector<ScoreRow> score_table(const std::vector<InterpretationList>& lists,
                                  const ReferenceLabel& label);

/// Number of feature pairs ordered differently by the two lists
/// (0 iff identical, n(n-1)/2 for a full reversal).
long long kendall_tau_distance(const InterpretationList& a, const InterpretationList& b);

/// Dispersion comparison backing the stability claim: mean pairwise Kendall
/// distance pooled over all base lists across runs, versus over the per-run
/// ensemble lists.
struct StabilityReport {
  std::size_t run_count = 0;
  double base_dispersion = 0.0;
  double ensemble_dispersion = 0.0;
  std::optional<double> mean_base_l_score;
  std::optional<double> mean_ensemble_l_score;
};

StabilityReport stability_report(const std::vector<std::vector<InterpretationList>>& base_runs,
                                 const std::vector<InterpretationList>& ensemble_per_run,
                                 const ReferenceLabel* label = nullptr);

}  // namespace interp
