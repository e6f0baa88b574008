#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "interp/dataset.hpp"
#include "interp/model.hpp"

namespace interp {

/// Per-feature real effects produced by one explanation method. phi is the
/// coefficient vector of the additive view g(x) = sum_i phi_i g_i(x_i) + eps;
/// residual_epsilon carries the surrogate fit error for the methods that fit
/// one (lime, gam, gsm), and is absent otherwise.
struct AttributionVector {
  std::vector<std::string> feature_names;
  std::vector<double> phi;
  std::string method_id;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> instance_index;
  std::optional<double> residual_epsilon;
  std::string warning;  // empty when the method completed cleanly

  /// Throws std::invalid_argument on non-finite phi or a length mismatch.
  void validate() const;

  std::string to_json_string() const;
  static AttributionVector from_json_string(const std::string& text);
};

void save_attribution(const AttributionVector& av, const std::string& path);
AttributionVector load_attribution(const std::string& path);

/// One mask-perturbed instance used by lime: mapped_row equals the explained
/// instance where mask = 1 and the background value where mask = 0.
struct PerturbationSample {
  std::vector<int> mask;
  std::vector<double> mapped_row;
  double kernel_weight = 0.0;
};

/// Conventional lime kernel width for an M-feature mask space.
double default_kernel_width(std::size_t n_features);

/// All explainers take the predictor positionally: ds columns must already
/// be in the predictor's feature order (use align_to_model for a Model).

/// Permutation feature importance: baseline accuracy minus the mean accuracy
/// over `repeats` independent column permutations, per feature.
AttributionVector pfi(const Predictor& m, const Dataset& ds, int repeats, std::uint64_t seed);

/// Monte-Carlo Shapley values by permutation walks; absent features take the
/// dataset mean as background. The value function is the predicted
/// probability of class_index.
AttributionVector shapley_sampling(const Predictor& m, const Dataset& ds,
                                   std::span<const double> instance, int n_samples,
                                   std::uint64_t seed, int class_index,
                                   std::optional<std::size_t> instance_index = std::nullopt);

/// Exact Shapley values by full subset enumeration (n_features <= 12),
/// same value function as shapley_sampling. Oracle for the sampler.
AttributionVector exact_shapley(const Predictor& m, const Dataset& ds,
                                std::span<const double> instance, int class_index,
                                std::optional<std::size_t> instance_index = std::nullopt);

/// Weighted ridge surrogate on binary masks (background = dataset means),
/// exponential kernel exp(-d^2/w^2) on mask Hamming distance. phi are the
/// surrogate coefficients; residual_epsilon is the weighted RMS fit error.
/// Singular normal equations escalate the ridge penalty (doubling from 1e-3)
/// and note the escalation in `warning`.
AttributionVector lime(const Predictor& m, const Dataset& ds, std::span<const double> instance,
                       int n_perturb, double kernel_width, std::uint64_t seed, int class_index,
                       std::optional<std::size_t> instance_index = std::nullopt);

/// phi_i = population std of the partial-dependence curve of feature i on an
/// equispaced min..max grid (flatness-to-importance reduction). A constant
/// feature has a degenerate grid and phi 0.
AttributionVector pdp_importance(const Predictor& m, const Dataset& ds, int grid_points,
                                 int class_index);

/// phi_i = count-weighted population std of the centered first-order ALE
/// curve on quantile bins; empty bins are skipped.
AttributionVector ale_importance(const Predictor& m, const Dataset& ds, int n_bins,
                                 int class_index);

/// Backfitted additive surrogate with binned piecewise-constant components
/// fit to the predicted probability of class_index. phi_i = population
/// variance of component i over the data; residual_epsilon = RMS residual.
/// Non-convergence within the iteration cap is reported via `warning`.
AttributionVector gam_importance(const Predictor& m, const Dataset& ds, int n_bins,
                                 int class_index);

/// Global surrogate tree on the model's argmax labels. phi = per-feature
/// Gini impurity decrease normalized to sum 1; residual_epsilon = 1 -
/// fidelity (agreement with the model's labels on the training rows).
AttributionVector surrogate_importance(const Predictor& m, const Dataset& ds,
                                       int surrogate_depth);

/// Friedman H^2-style total interaction statistic of each feature versus all
/// others, from a partial-dependence decomposition over a deterministic
/// subsample of at most sample_cap rows (subsample stream seeded 0 by
/// convention).
AttributionVector interaction_importance(const Predictor& m, const Dataset& ds, int grid_points,
                                         int sample_cap, int class_index);

}  // namespace interp
