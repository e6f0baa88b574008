#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "interp/explainers.hpp"

namespace interp {

/// Strict total order over a feature universe, most important first.
struct InterpretationList {
  std::vector<std::string> ordered_features;
  std::string provenance;  // method id, list name, or "ensemble"
  std::size_t source_count = 1;

  /// Throws std::invalid_argument unless ordered_features is a permutation
  /// of `universe` (no duplicates, no omissions, no strangers).
  void validate(const std::vector<std::string>& universe) const;
};

/// Positional Borda tally: the feature ranked j-th in a list of n earns
/// n - j + 1 points; totals accumulate over all m lists.
struct ScoreBoard {
  std::vector<std::string> features;        // canonical universe order
  std::vector<long long> totals;            // per feature, aligned with `features`
  std::vector<long long> position_scores;   // n, n-1, ..., 1
  std::size_t list_count = 0;               // m

  long long total_of(const std::string& feature) const;
};

/// Sort key for turning attributions into lists: magnitude uses |phi|
/// (default; large negative effects count as important), signed uses raw
/// phi descending.
enum class ListMode { magnitude, signed_values };

std::string to_string(ListMode mode);
ListMode list_mode_from_string(const std::string& name);

/// Composite mapping from an attribution vector to an interpretation list:
/// descending sort key per `mode`, exact-tie break by ascending feature
/// index. Always a full permutation of av.feature_names.
InterpretationList to_list(const AttributionVector& av, ListMode mode = ListMode::magnitude);

/// Borda tally of m lists over `universe` (every list must be a permutation
/// of it). The universe also fixes the tie-break order downstream.
ScoreBoard borda_scores(const std::vector<InterpretationList>& lists,
                        const std::vector<std::string>& universe);

/// Ensemble list: features by descending Borda total, ties by ascending
/// universe index; provenance "ensemble", source_count m.
InterpretationList aggregate(const std::vector<InterpretationList>& lists,
                             const std::vector<std::string>& universe);

/// Parses one `provenance: f1 > f2 > ... > fn` line (provenance optional,
/// braces and whitespace tolerated) and validates it against the universe.
/// Errors name the offending feature.
InterpretationList parse_list(const std::string& text,
                              const std::vector<std::string>& universe);

enum class RepairPolicy { none, replace_second_duplicate_with_missing };

RepairPolicy repair_policy_from_string(const std::string& name);
std::string to_string(RepairPolicy policy);

struct ParsedList {
  InterpretationList list;
  std::string repair_note;  // empty when the line needed no repair
};

/// parse_list with one recovery rule: when the line has exactly one feature
/// twice and exactly one universe feature absent, the second occurrence of
/// the duplicate is replaced by the missing feature and the repair is
/// recorded. Any other inconsistency is unrepairable.
ParsedList repair_list(const std::string& text, const std::vector<std::string>& universe,
                       RepairPolicy policy);

std::string format_list(const InterpretationList& list);

/// Loads a list file (one list per line, '#' comments and blank lines
/// skipped). An empty `universe` derives one from the first line's tokens
/// in lexicographic order. Lines are repaired per `policy`.
std::vector<ParsedList> load_lists(const std::string& path,
                                   std::vector<std::string> universe,
                                   RepairPolicy policy = RepairPolicy::none);

void save_lists(const std::vector<InterpretationList>& lists, const std::string& path);

}  // namespace interp
