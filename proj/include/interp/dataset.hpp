#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace interp {

/// Named-feature tabular matrix with integer class targets.
/// Immutable by convention after construction; all operations that take a
/// Dataset treat it as read-only, so sharing across threads is safe.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;  // n_samples x n_features
  std::vector<int> targets;               // index into class_names
  std::vector<std::string> class_names;

  std::size_t n_samples() const { return rows.size(); }
  std::size_t n_features() const { return feature_names.size(); }
  std::size_t n_classes() const { return class_names.size(); }

  std::vector<double> column(std::size_t j) const;

  /// Throws std::invalid_argument if any structural invariant is violated
  /// (row arity, finiteness, unique non-empty names, target range, minimum
  /// size of 2 samples and 1 feature).
  void validate() const;
};

/// Per-feature summary statistics. Standard deviation uses the population
/// (divide-by-n) convention throughout the toolkit.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> min;
  std::vector<double> max;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  bool stratified = true;
  std::string note;  // non-empty when stratification was not possible
};

/// Loads a comma-separated file (UTF-8, header row, '.' decimal point).
/// The target column is selected by name; class names are recorded in
/// first-appearance order. Reports row/column on the first bad cell.
Dataset load_csv(const std::string& path, const std::string& target_column);

/// Inverse of load_csv: emits a header plus one row per sample, doubles in
/// shortest round-trip form, target column last. load_csv(format_csv(ds))
/// reproduces ds exactly.
std::string format_csv(const Dataset& ds, const std::string& target_column = "class");
void save_csv(const Dataset& ds, const std::string& path,
              const std::string& target_column = "class");

/// Deterministic train/test split. Stratified by class when every class has
/// at least 2 members, otherwise falls back to a plain shuffle and says so
/// in the result note. The test part receives ceil(fraction * n) samples,
/// allocated to strata by largest remainder.
SplitResult split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Index-level variant used when several projections must share one split.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const Dataset& ds, double test_fraction, std::uint64_t seed,
    bool* stratified = nullptr);

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& indices);

FeatureStats feature_stats(const Dataset& ds);

/// Pearson coefficient of each feature against the numeric class index.
/// Constant features (or a constant target) map to 0 by convention. Using
/// the class index as a numeric target is a documented simplification.
std::vector<double> pearson_correlation(const Dataset& ds);

}  // namespace interp
