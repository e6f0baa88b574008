#include "interp/listspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace interp {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  const auto junk = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '{' || c == '}';
  };
  while (lo < hi && junk(s[lo])) ++lo;
  while (hi > lo && junk(s[hi - 1])) --hi;
  return s.substr(lo, hi - lo);
}

// splits "provenance: a > b > c" into (provenance, tokens); the provenance
// separator is the first ':' before the first '>'
std::pair<std::string, std::vector<std::string>> tokenize(const std::string& text) {
  std::string provenance;
  std::string body = text;
  const std::size_t colon = text.find(':');
  const std::size_t gt = text.find('>');
  if (colon != std::string::npos && (gt == std::string::npos || colon < gt)) {
    provenance = trim(text.substr(0, colon));
    body = text.substr(colon + 1);
  }
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t sep = body.find('>', start);
    const std::string piece =
        trim(sep == std::string::npos ? body.substr(start) : body.substr(start, sep - start));
    if (!piece.empty()) tokens.push_back(piece);
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return {provenance, tokens};
}

std::unordered_map<std::string, std::size_t> index_universe(
    const std::vector<std::string>& universe) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t j = 0; j < universe.size(); ++j) idx[universe[j]] = j;
  return idx;
}

InterpretationList build_validated(const std::string& provenance,
                                   const std::vector<std::string>& tokens,
                                   const std::vector<std::string>& universe) {
  const auto idx = index_universe(universe);
  std::vector<int> seen(universe.size(), 0);
  for (const std::string& t : tokens) {
    const auto it = idx.find(t);
    if (it == idx.end()) throw std::invalid_argument("unknown feature '" + t + "'");
    if (++seen[it->second] > 1) throw std::invalid_argument("duplicate feature '" + t + "'");
  }
  for (std::size_t j = 0; j < universe.size(); ++j)
    if (seen[j] == 0) throw std::invalid_argument("missing feature '" + universe[j] + "'");
  InterpretationList list;
  list.ordered_features = tokens;
  list.provenance = provenance.empty() ? "list" : provenance;
  list.source_count = 1;
  return list;
}

}  // namespace

void InterpretationList::validate(const std::vector<std::string>& universe) const {
  const auto idx = index_universe(universe);
  std::vector<int> seen(universe.size(), 0);
  for (const std::string& f : ordered_features) {
    const auto it = idx.find(f);
    if (it == idx.end()) throw std::invalid_argument("unknown feature '" + f + "'");
    if (++seen[it->second] > 1) throw std::invalid_argument("duplicate feature '" + f + "'");
  }
  for (std::size_t j = 0; j < universe.size(); ++j)
    if (seen[j] == 0) throw std::invalid_argument("missing feature '" + universe[j] + "'");
}

long long ScoreBoard::total_of(const std::string& feature) const {
  for (std::size_t j = 0; j < features.size(); ++j)
    if (features[j] == feature) return totals[j];
  throw std::invalid_argument("unknown feature '" + feature + "'");
}

std::string to_string(ListMode mode) {
  return mode == ListMode::magnitude ? "magnitude" : "signed";
}

ListMode list_mode_from_string(const std::string& name) {
  if (name == "magnitude") return ListMode::magnitude;
  if (name == "signed") return ListMode::signed_values;
  throw std::invalid_argument("unknown list mode '" + name + "' (magnitude|signed)");
}

InterpretationList to_list(const AttributionVector& av, ListMode mode) {
  av.validate();
  const std::size_t d = av.phi.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto key = [&](std::size_t j) {
    return mode == ListMode::magnitude ? std::abs(av.phi[j]) : av.phi[j];
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    return a < b;  // exact ties fall back to the original feature index
  });
  InterpretationList list;
  list.ordered_features.reserve(d);
  for (std::size_t j : order) list.ordered_features.push_back(av.feature_names[j]);
  list.provenance = av.method_id;
  list.source_count = 1;
  return list;
}

ScoreBoard borda_scores(const std::vector<InterpretationList>& lists,
                        const std::vector<std::string>& universe) {
  if (lists.empty()) throw std::invalid_argument("borda_scores needs at least one list");
  const auto idx = index_universe(universe);
  const std::size_t n = universe.size();

  ScoreBoard board;
  board.features = universe;
  board.totals.assign(n, 0);
  board.position_scores.resize(n);
  for (std::size_t j = 0; j < n; ++j) board.position_scores[j] = static_cast<long long>(n - j);
  board.list_count = lists.size();

  for (std::size_t li = 0; li < lists.size(); ++li) {
    const InterpretationList& list = lists[li];
    if (list.ordered_features.size() != n)
      throw std::invalid_argument("list " + std::to_string(li) + " has " +
                                  std::to_string(list.ordered_features.size()) +
                                  " features, universe has " + std::to_string(n));
    std::vector<int> seen(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::string& f = list.ordered_features[pos];
      const auto it = idx.find(f);
      if (it == idx.end())
        throw std::invalid_argument("list " + std::to_string(li) + ": unknown feature '" + f +
                                    "'");
      if (++seen[it->second] > 1)
        throw std::invalid_argument("list " + std::to_string(li) + ": duplicate feature '" + f +
                                    "'");
      board.totals[it->second] += static_cast<long long>(n - pos);  // rank j earns n - j + 1
    }
  }
  return board;
}

InterpretationList aggregate(const std::vector<InterpretationList>& lists,
                             const std::vector<std::string>& universe) {
  const ScoreBoard board = borda_scores(lists, universe);
  const std::size_t n = universe.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (board.totals[a] != board.totals[b]) return board.totals[a] > board.totals[b];
    return a < b;  // universe index breaks total ties
  });
  InterpretationList list;
  list.ordered_features.reserve(n);
  for (std::size_t j : order) list.ordered_features.push_back(universe[j]);
  list.provenance = "ensemble";
  list.source_count = lists.size();
  return list;
}

InterpretationList parse_list(const std::string& text,
                              const std::vector<std::string>& universe) {
  const auto [provenance, tokens] = tokenize(text);
  return build_validated(provenance, tokens, universe);
}

RepairPolicy repair_policy_from_string(const std::string& name) {
  if (name == "none") return RepairPolicy::none;
  if (name == "replace-second-duplicate" || name == "replace_second_duplicate_with_missing")
    return RepairPolicy::replace_second_duplicate_with_missing;
  throw std::invalid_argument("unknown repair policy '" + name +
                              "' (none|replace-second-duplicate)");
}

std::string to_string(RepairPolicy policy) {
  return policy == RepairPolicy::none ? "none" : "replace-second-duplicate";
}

ParsedList repair_list(const std::string& text, const std::vector<std::string>& universe,
                       RepairPolicy policy) {
  auto [provenance, tokens] = tokenize(text);
  const auto idx = index_universe(universe);

  std::vector<int> count(universe.size(), 0);
  for (const std::string& t : tokens) {
    const auto it = idx.find(t);
    if (it == idx.end()) throw std::invalid_argument("unknown feature '" + t + "'");
    ++count[it->second];
  }

  bool valid = tokens.size() == universe.size();
  for (int c : count) valid = valid && c == 1;
  if (valid) {
    ParsedList out;
    out.list = build_validated(provenance, tokens, universe);
    return out;
  }
  if (policy == RepairPolicy::none) {
    // surface the precise defect through the strict parser
    build_validated(provenance, tokens, universe);
    throw std::logic_error("unreachable: invalid list passed strict validation");
  }

  std::vector<std::string> duplicated, missing;
  for (std::size_t j = 0; j < universe.size(); ++j) {
    if (count[j] == 2) duplicated.push_back(universe[j]);
    if (count[j] == 0) missing.push_back(universe[j]);
    if (count[j] > 2)
      throw std::invalid_argument("unrepairable list: feature '" + universe[j] +
                                  "' appears " + std::to_string(count[j]) + " times");
  }
  if (duplicated.size() != 1 || missing.size() != 1 || tokens.size() != universe.size())
    throw std::invalid_argument(
        "unrepairable list: need exactly one duplicated and one missing feature, found " +
        std::to_string(duplicated.size()) + " duplicated and " + std::to_string(missing.size()) +
        " missing");

  std::size_t occurrence = 0;
  std::size_t repaired_pos = 0;
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    if (tokens[pos] == duplicated[0] && ++occurrence == 2) {
      tokens[pos] = missing[0];
      repaired_pos = pos;
      break;
    }
  }
  ParsedList out;
  out.list = build_validated(provenance, tokens, universe);
  std::ostringstream note;
  note << "repaired '" << out.list.provenance << "': second occurrence of '" << duplicated[0]
       << "' at position " << repaired_pos + 1 << " replaced by missing feature '" << missing[0]
       << "'";
  out.repair_note = note.str();
  return out;
}

std::string format_list(const InterpretationList& list) {
  std::ostringstream out;
  out << list.provenance << ": ";
  for (std::size_t j = 0; j < list.ordered_features.size(); ++j) {
    if (j > 0) out << " > ";
    out << list.ordered_features[j];
  }
  return out.str();
}

std::vector<ParsedList> load_lists(const std::string& path, std::vector<std::string> universe,
                                   RepairPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<ParsedList> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (universe.empty()) {
      universe = tokenize(stripped).second;
      std::sort(universe.begin(), universe.end());
    }
    try {
      out.push_back(repair_list(stripped, universe, policy));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw std::runtime_error(path + ": no lists found");
  return out;
}

void save_lists(const std::vector<InterpretationList>& lists, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (const InterpretationList& list : lists) out << format_list(list) << '\n';
}

}  // namespace interp
