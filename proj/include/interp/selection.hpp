#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "interp/dataset.hpp"
#include "interp/listspace.hpp"
#include "interp/model.hpp"

namespace interp {

/// First n features of the list, order preserved.
std::vector<std::string> top_n(const InterpretationList& list, std::size_t n);

/// Top n features by |Pearson coefficient| against the numeric class index,
/// ties broken by ascending feature index.
std::vector<std::string> correlation_select(const Dataset& ds, std::size_t n);

/// Column projection onto the named features (in the given order).
Dataset project(const Dataset& ds, const std::vector<std::string>& features);

struct SelectionCell {
  std::string model_kind;
  std::string method;   // subset label, e.g. "ensemble", "correlation", "all"
  std::size_t n_kept = 0;
  double test_accuracy = 0.0;
  std::vector<std::string> features;
};

struct SelectionReport {
  std::vector<SelectionCell> cells;  // sorted by (model kind, method, n_kept)
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct NamedSubset {
  std::string method;
  std::vector<std::string> features;
};

/// Retrains every spec on every subset over one shared deterministic split
/// (identical across subsets for fairness) and reports test accuracies.
/// A full-feature "all" cell is always included per model kind as the
/// baseline.
SelectionReport retrain_compare(const Dataset& ds, const std::vector<NamedSubset>& subsets,
                                const std::vector<ModelSpec>& specs, double test_fraction,
                                std::uint64_t seed);

}  // namespace interp
