#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "interp/dataset.hpp"
#include "interp/tree.hpp"

namespace interp {

enum class ModelKind { decision_tree, random_forest, logistic, gaussian_nb, gbdt };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Hyperparameters shared across the five model kinds; each kind reads the
/// subset it cares about. Serialized as a named map.
struct ModelSpec {
  ModelKind kind = ModelKind::random_forest;
  int max_depth = 8;
  int n_trees = 100;
  double learning_rate = 0.1;
  int n_rounds = 100;
  double l2_penalty = 1e-3;
  int max_iterations = 500;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Uniform class-probability prediction contract. Rows are positional in
/// the trainer's feature order; outputs are non-negative and sum to 1.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t n_features() const = 0;
  virtual std::size_t n_classes() const = 0;
  virtual std::vector<double> predict_proba(std::span<const double> row) const = 0;

  /// Argmax with ties broken by the lowest class index.
  int predict_class(std::span<const double> row) const;
};

struct TreeParams {
  ClassificationTree tree;
};

struct ForestParams {
  std::vector<ClassificationTree> trees;
};

struct LogisticParams {
  // weights[c] has n_features coefficients plus a trailing bias; inputs are
  // standardized with the stored training moments before the dot product.
  std::vector<std::vector<double>> weights;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
};

struct GaussianNbParams {
  std::vector<double> log_prior;                  // per class
  std::vector<std::vector<double>> mean;          // class x feature
  std::vector<std::vector<double>> variance;      // class x feature, smoothed
};

struct GbdtParams {
  // scores[c] = sum over rounds of learning_rate * tree value, softmaxed
  std::vector<std::vector<RegressionTree>> trees;  // round x class
  double learning_rate = 0.1;
};

class Model final : public Predictor {
 public:
  ModelSpec spec;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::variant<TreeParams, ForestParams, LogisticParams, GaussianNbParams, GbdtParams> params;

  std::size_t n_features() const override { return feature_names.size(); }
  std::size_t n_classes() const override { return class_names.size(); }
  std::vector<double> predict_proba(std::span<const double> row) const override;

  /// Name-resolved prediction: `names` gives the column order of `row`,
  /// which may be any permutation of the training feature set.
  std::vector<double> predict_proba_named(std::span<const double> row,
                                          std::span<const std::string> names) const;

  std::string to_json_string() const;
  static Model from_json_string(const std::string& text);
};

Model train(const Dataset& ds, const ModelSpec& spec);

/// Fraction of argmax-correct predictions; ds columns are resolved against
/// the model's training feature names and may be permuted.
double accuracy(const Model& m, const Dataset& ds);

/// Positional variant for plain predictors (ds column order must match).
double accuracy(const Predictor& m, const Dataset& ds);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

/// Maps each dataset column to the model's training position; throws on a
/// schema mismatch (missing or extra features).
std::vector<std::size_t> resolve_columns(const Model& m,
                                         const std::vector<std::string>& names);

/// Reorders dataset columns into the model's training order (no-op copy
/// when they already agree).
Dataset align_to_model(const Model& m, const Dataset& ds);

}  // namespace interp
