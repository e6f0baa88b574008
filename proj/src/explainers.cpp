#include "interp/explainers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "interp/rng.hpp"
#include "interp/tree.hpp"

namespace interp {

using json = nlohmann::ordered_json;

void AttributionVector::validate() const {
  if (method_id.empty()) throw std::invalid_argument("attribution method_id is empty");
  if (phi.size() != feature_names.size())
    throw std::invalid_argument("attribution phi length " + std::to_string(phi.size()) +
                                " does not match " + std::to_string(feature_names.size()) +
                                " feature names");
  for (double v : phi)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite phi in attribution");
  if (residual_epsilon && !(*residual_epsilon >= 0.0))
    throw std::invalid_argument("residual_epsilon must be >= 0");
}

std::string AttributionVector::to_json_string() const {
  json o;
  o["method"] = method_id;
  if (seed) o["seed"] = *seed; else o["seed"] = nullptr;
  if (instance_index) o["instance"] = *instance_index; else o["instance"] = nullptr;
  o["features"] = feature_names;
  o["phi"] = phi;
  if (residual_epsilon) o["epsilon"] = *residual_epsilon; else o["epsilon"] = nullptr;
  if (!warning.empty()) o["warning"] = warning;
  return o.dump(2);
}

AttributionVector AttributionVector::from_json_string(const std::string& text) {
  const json o = json::parse(text);
  AttributionVector av;
  av.method_id = o.at("method").get<std::string>();
  if (!o.at("seed").is_null()) av.seed = o.at("seed").get<std::uint64_t>();
  if (!o.at("instance").is_null()) av.instance_index = o.at("instance").get<std::size_t>();
  av.feature_names = o.at("features").get<std::vector<std::string>>();
  av.phi = o.at("phi").get<std::vector<double>>();
  if (!o.at("epsilon").is_null()) av.residual_epsilon = o.at("epsilon").get<double>();
  if (o.contains("warning")) av.warning = o.at("warning").get<std::string>();
  av.validate();
  return av;
}

void save_attribution(const AttributionVector& av, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << av.to_json_string() << '\n';
}

AttributionVector load_attribution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return AttributionVector::from_json_string(buf.str());
}

double default_kernel_width(std::size_t n_features) {
  return 0.75 * std::sqrt(static_cast<double>(n_features));
}

namespace {

void check_compatible(const Predictor& m, const Dataset& ds) {
  if (ds.n_features() != m.n_features())
    throw std::invalid_argument("dataset has " + std::to_string(ds.n_features()) +
                                " features, model expects " + std::to_string(m.n_features()));
}

void check_class(const Predictor& m, int class_index) {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= m.n_classes())
    throw std::invalid_argument("class index " + std::to_string(class_index) +
                                " out of range for " + std::to_string(m.n_classes()) +
                                " classes");
}

void check_instance(std::span<const double> instance, std::size_t d) {
  if (instance.size() != d)
    throw std::invalid_argument("instance has " + std::to_string(instance.size()) +
                                " values, expected " + std::to_string(d));
  for (double v : instance)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in instance");
}

double population_std(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;  // constant sample: exact zero, no summation noise
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

/// Linear-interpolation quantile (numpy default convention) of sorted values.
double sorted_quantile(const std::vector<double>& sorted_vals, double p) {
  const std::size_t n = sorted_vals.size();
  if (n == 1) return sorted_vals[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted_vals[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted_vals[lo] + frac * (sorted_vals[lo + 1] - sorted_vals[lo]);
}

/// Solves A x = b for symmetric positive definite A by Cholesky; returns
/// false when a pivot degenerates (A effectively singular).
bool cholesky_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                    std::vector<double>& out) {
  const std::size_t p = b.size();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i][k] * a[j][k];
      if (i == j) {
        if (sum <= 1e-12) return false;
        a[i][i] = std::sqrt(sum);
      } else {
        a[i][j] = sum / a[j][j];
      }
    }
  }
  // forward substitution L y = b, then backward L^T x = y
  for (std::size_t i = 0; i < p; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= a[i][k] * b[k];
    b[i] = sum / a[i][i];
  }
  out.assign(p, 0.0);
  for (std::size_t ii = p; ii-- > 0;) {
    double sum = b[ii];
    for (std::size_t k = ii + 1; k < p; ++k) sum -= a[k][ii] * out[k];
    out[ii] = sum / a[ii][ii];
  }
  return true;
}

}  // namespace

AttributionVector pfi(const Predictor& m, const Dataset& ds, int repeats, std::uint64_t seed) {
  check_compatible(m, ds);
  if (repeats < 1) throw std::invalid_argument("pfi repeats must be >= 1");
  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();

  const auto score = [&](const std::vector<std::vector<double>>& rows) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m.predict_class(rows[i]) == ds.targets[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(n);
  };

  const double baseline = score(ds.rows);
  std::vector<std::vector<double>> rows = ds.rows;  // scratch copy, one column dirty at a time

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "pfi";
  av.seed = seed;
  av.phi.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean_permuted = 0.0;
    for (int r = 0; r < repeats; ++r) {
      Substream rng(seed, RngDomain::pfi_permutation, j, static_cast<std::uint64_t>(r));
      const std::vector<std::size_t> perm = rng.permutation(n);
      for (std::size_t i = 0; i < n; ++i) rows[i][j] = ds.rows[perm[i]][j];
      mean_permuted += score(rows);
    }
    mean_permuted /= static_cast<double>(repeats);
    av.phi[j] = baseline - mean_permuted;
    for (std::size_t i = 0; i < n; ++i) rows[i][j] = ds.rows[i][j];
  }
  av.validate();
  return av;
}

AttributionVector shapley_sampling(const Predictor& m, const Dataset& ds,
                                   std::span<const double> instance, int n_samples,
                                   std::uint64_t seed, int class_index,
                                   std::optional<std::size_t> instance_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  const std::size_t d = ds.n_features();
  check_instance(instance, d);
  if (n_samples < 1) throw std::invalid_argument("shapley n_samples must be >= 1");

  const std::vector<double> background = feature_stats(ds).mean;
  const auto value = [&](const std::vector<double>& row) {
    return m.predict_proba(row)[static_cast<std::size_t>(class_index)];
  };
  const double v_background = value(background);

  std::vector<double> phi(d, 0.0);
  std::vector<double> row(d);
  for (int s = 0; s < n_samples; ++s) {
    Substream rng(seed, RngDomain::shapley_permutation, static_cast<std::uint64_t>(s));
    const std::vector<std::size_t> perm = rng.permutation(d);
    row.assign(background.begin(), background.end());
    double prev = v_background;
    for (std::size_t k : perm) {
      row[k] = instance[k];
      const double cur = value(row);
      phi[k] += cur - prev;
      prev = cur;
    }
  }
  for (double& p : phi) p /= static_cast<double>(n_samples);

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.phi = std::move(phi);
  av.method_id = "shap";
  av.seed = seed;
  av.instance_index = instance_index;
  av.validate();
  return av;
}

AttributionVector exact_shapley(const Predictor& m, const Dataset& ds,
                                std::span<const double> instance, int class_index,
                                std::optional<std::size_t> instance_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  const std::size_t d = ds.n_features();
  check_instance(instance, d);
  if (d > 12)
    throw std::invalid_argument("exact_shapley enumerates 2^n subsets; " + std::to_string(d) +
                                " features exceed the cap of 12");

  const std::vector<double> background = feature_stats(ds).mean;
  std::vector<double> values(std::size_t{1} << d);
  std::vector<double> row(d);
  for (std::size_t mask = 0; mask < values.size(); ++mask) {
    for (std::size_t j = 0; j < d; ++j)
      row[j] = (mask >> j) & 1u ? instance[j] : background[j];
    values[mask] = m.predict_proba(row)[static_cast<std::size_t>(class_index)];
  }

  std::vector<double> factorial(d + 1, 1.0);
  for (std::size_t k = 1; k <= d; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "exact_shapley";
  av.instance_index = instance_index;
  av.phi.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < values.size(); ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      const double w = factorial[s] * factorial[d - s - 1] / factorial[d];
      av.phi[j] += w * (values[mask | bit] - values[mask]);
    }
  }
  av.validate();
  return av;
}

AttributionVector lime(const Predictor& m, const Dataset& ds, std::span<const double> instance,
                       int n_perturb, double kernel_width, std::uint64_t seed, int class_index,
                       std::optional<std::size_t> instance_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  const std::size_t d = ds.n_features();
  check_instance(instance, d);
  if (n_perturb < static_cast<int>(d) + 1)
    throw std::invalid_argument("lime needs n_perturb >= n_features + 1");
  if (!(kernel_width > 0.0)) throw std::invalid_argument("lime kernel width must be > 0");

  const std::vector<double> background = feature_stats(ds).mean;
  const auto n = static_cast<std::size_t>(n_perturb);

  std::vector<PerturbationSample> samples(n);
  std::vector<double> y(n);
  for (std::size_t s = 0; s < n; ++s) {
    PerturbationSample& ps = samples[s];
    ps.mask.assign(d, 1);
    if (s > 0) {
      Substream rng(seed, RngDomain::lime_mask, s);
      for (std::size_t j = 0; j < d; ++j) ps.mask[j] = rng.next_bool() ? 1 : 0;
    }
    ps.mapped_row.resize(d);
    std::size_t zeros = 0;
    for (std::size_t j = 0; j < d; ++j) {
      ps.mapped_row[j] = ps.mask[j] ? instance[j] : background[j];
      zeros += ps.mask[j] ? 0 : 1;
    }
    const double dist = static_cast<double>(zeros);
    ps.kernel_weight = std::exp(-(dist * dist) / (kernel_width * kernel_width));
    y[s] = m.predict_proba(ps.mapped_row)[static_cast<std::size_t>(class_index)];
  }

  // weighted ridge on [1, mask] with the intercept unpenalized
  const std::size_t p = d + 1;
  std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
  std::vector<double> atb(p, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double w = samples[s].kernel_weight;
    std::vector<double> z(p, 1.0);
    for (std::size_t j = 0; j < d; ++j) z[j + 1] = samples[s].mask[j];
    for (std::size_t a = 0; a < p; ++a) {
      atb[a] += w * z[a] * y[s];
      for (std::size_t b = 0; b <= a; ++b) ata[a][b] += w * z[a] * z[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) ata[a][b] = ata[b][a];

  const double lambda0 = 1e-3;
  double lambda = lambda0;
  std::vector<double> beta;
  bool solved = false;
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<std::vector<double>> a = ata;
    for (std::size_t j = 1; j < p; ++j) a[j][j] += lambda;
    if (cholesky_solve(std::move(a), atb, beta)) {
      solved = true;
      break;
    }
    lambda *= 2.0;
  }
  if (!solved)
    throw std::runtime_error("lime: normal equations remained singular after ridge escalation");

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "lime";
  av.seed = seed;
  av.instance_index = instance_index;
  av.phi.assign(beta.begin() + 1, beta.end());
  if (lambda != lambda0) {
    std::ostringstream msg;
    msg << "ridge penalty escalated from " << lambda0 << " to " << lambda
        << " to regularize singular normal equations";
    av.warning = msg.str();
  }

  double wse = 0.0, wsum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double fit = beta[0];
    for (std::size_t j = 0; j < d; ++j) fit += beta[j + 1] * samples[s].mask[j];
    const double r = y[s] - fit;
    wse += samples[s].kernel_weight * r * r;
    wsum += samples[s].kernel_weight;
  }
  av.residual_epsilon = wsum > 0.0 ? std::sqrt(wse / wsum) : 0.0;
  av.validate();
  return av;
}

AttributionVector pdp_importance(const Predictor& m, const Dataset& ds, int grid_points,
                                 int class_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  if (grid_points < 2) throw std::invalid_argument("pdp grid_points must be >= 2");
  const std::size_t d = ds.n_features();
  const std::size_t n = ds.n_samples();
  const FeatureStats st = feature_stats(ds);
  const auto t = static_cast<std::size_t>(grid_points);

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "pdp";
  av.phi.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (st.max[j] <= st.min[j]) continue;  // degenerate grid: flat by convention
    std::vector<double> grid(t);
    for (std::size_t g = 0; g < t; ++g)
      grid[g] = st.min[j] +
                (st.max[j] - st.min[j]) * static_cast<double>(g) / static_cast<double>(t - 1);
    std::vector<double> pd(t, 0.0);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
      row = ds.rows[i];
      for (std::size_t g = 0; g < t; ++g) {
        row[j] = grid[g];
        pd[g] += m.predict_proba(row)[static_cast<std::size_t>(class_index)];
      }
    }
    for (double& v : pd) v /= static_cast<double>(n);
    av.phi[j] = population_std(pd);
  }
  av.validate();
  return av;
}

AttributionVector ale_importance(const Predictor& m, const Dataset& ds, int n_bins,
                                 int class_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  if (n_bins < 1) throw std::invalid_argument("ale n_bins must be >= 1");
  const std::size_t d = ds.n_features();
  const std::size_t n = ds.n_samples();
  const auto b = static_cast<std::size_t>(n_bins);

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "ale";
  av.phi.assign(d, 0.0);
  std::vector<double> row(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> sorted_vals = ds.column(j);
    std::sort(sorted_vals.begin(), sorted_vals.end());
    std::vector<double> edges(b + 1);
    for (std::size_t k = 0; k <= b; ++k)
      edges[k] = sorted_quantile(sorted_vals, static_cast<double>(k) / static_cast<double>(b));

    // row i belongs to the first bin whose upper edge reaches its value
    std::vector<std::vector<std::size_t>> members(b);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = ds.rows[i][j];
      const auto it = std::lower_bound(edges.begin() + 1, edges.end(), v);
      auto k = static_cast<std::size_t>(it - (edges.begin() + 1));
      if (k >= b) k = b - 1;
      members[k].push_back(i);
    }

    double cumulative = 0.0;
    std::vector<double> curve;          // per non-empty bin
    std::vector<std::size_t> weights;   // member count per non-empty bin
    for (std::size_t k = 0; k < b; ++k) {
      if (members[k].empty()) continue;
      double delta = 0.0;
      for (std::size_t i : members[k]) {
        row = ds.rows[i];
        row[j] = edges[k + 1];
        const double hi = m.predict_proba(row)[static_cast<std::size_t>(class_index)];
        row[j] = edges[k];
        const double lo = m.predict_proba(row)[static_cast<std::size_t>(class_index)];
        delta += hi - lo;
      }
      delta /= static_cast<double>(members[k].size());
      cumulative += delta;
      curve.push_back(cumulative);
      weights.push_back(members[k].size());
    }
    if (curve.empty()) continue;

    double mean = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < curve.size(); ++k) {
      mean += curve[k] * static_cast<double>(weights[k]);
      total += weights[k];
    }
    mean /= static_cast<double>(total);
    double ss = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k)
      ss += static_cast<double>(weights[k]) * (curve[k] - mean) * (curve[k] - mean);
    av.phi[j] = std::sqrt(ss / static_cast<double>(total));
  }
  av.validate();
  return av;
}

AttributionVector gam_importance(const Predictor& m, const Dataset& ds, int n_bins,
                                 int class_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  if (n_bins < 2) throw std::invalid_argument("gam n_bins must be >= 2");
  const std::size_t d = ds.n_features();
  const std::size_t n = ds.n_samples();
  const auto b = static_cast<std::size_t>(n_bins);
  const FeatureStats st = feature_stats(ds);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = m.predict_proba(ds.rows[i])[static_cast<std::size_t>(class_index)];
  double alpha = 0.0;
  for (double v : y) alpha += v;
  alpha /= static_cast<double>(n);

  // equal-width bins over the observed range; a constant feature collapses
  // to one bin and contributes a zero component
  std::vector<std::vector<std::size_t>> bin_of(d, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < d; ++j) {
    const double lo = st.min[j], hi = st.max[j];
    if (hi <= lo) continue;
    for (std::size_t i = 0; i < n; ++i) {
      auto k = static_cast<std::size_t>((ds.rows[i][j] - lo) / (hi - lo) *
                                        static_cast<double>(b));
      if (k >= b) k = b - 1;
      bin_of[j][i] = k;
    }
  }

  std::vector<std::vector<double>> h(d, std::vector<double>(b, 0.0));
  std::vector<double> fit(n, alpha);
  const int iteration_cap = 100;
  bool converged = false;
  std::vector<double> bin_sum(b), partial(n);
  std::vector<std::size_t> bin_count(b);
  for (int iter = 0; iter < iteration_cap; ++iter) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      std::fill(bin_sum.begin(), bin_sum.end(), 0.0);
      std::fill(bin_count.begin(), bin_count.end(), std::size_t{0});
      for (std::size_t i = 0; i < n; ++i) {
        partial[i] = y[i] - fit[i] + h[j][bin_of[j][i]];
        bin_sum[bin_of[j][i]] += partial[i];
        ++bin_count[bin_of[j][i]];
      }
      std::vector<double> updated(b, 0.0);
      for (std::size_t k = 0; k < b; ++k)
        if (bin_count[k] > 0) updated[k] = bin_sum[k] / static_cast<double>(bin_count[k]);
      // center the component over the data distribution
      double comp_mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) comp_mean += updated[bin_of[j][i]];
      comp_mean /= static_cast<double>(n);
      for (std::size_t k = 0; k < b; ++k)
        if (bin_count[k] > 0) updated[k] -= comp_mean;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = updated[bin_of[j][i]] - h[j][bin_of[j][i]];
        fit[i] += delta;
        max_change = std::max(max_change, std::abs(delta));
      }
      h[j] = std::move(updated);
    }
    if (max_change < 1e-10) {
      converged = true;
      break;
    }
  }

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "gam";
  av.phi.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> component(n);
    for (std::size_t i = 0; i < n; ++i) component[i] = h[j][bin_of[j][i]];
    const double s = population_std(component);
    av.phi[j] = s * s;  // component variance
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) sse += (y[i] - fit[i]) * (y[i] - fit[i]);
  av.residual_epsilon = std::sqrt(sse / static_cast<double>(n));
  if (!converged)
    av.warning = "backfitting did not converge within " + std::to_string(iteration_cap) +
                 " iterations";
  av.validate();
  return av;
}

AttributionVector surrogate_importance(const Predictor& m, const Dataset& ds,
                                       int surrogate_depth) {
  check_compatible(m, ds);
  if (surrogate_depth < 1) throw std::invalid_argument("surrogate depth must be >= 1");
  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = m.predict_class(ds.rows[i]);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  ClassificationTree tree;
  tree.train(ds.rows, labels, m.n_classes(), all, surrogate_depth);

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "gsm";
  av.phi = tree.impurity_importance(d);
  double total = 0.0;
  for (double v : av.phi) total += v;
  if (total > 0.0)
    for (double& v : av.phi) v /= total;

  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (tree.predict_class(ds.rows[i]) == labels[i]) ++agree;
  av.residual_epsilon = 1.0 - static_cast<double>(agree) / static_cast<double>(n);
  av.validate();
  return av;
}

AttributionVector interaction_importance(const Predictor& m, const Dataset& ds, int grid_points,
                                         int sample_cap, int class_index) {
  check_compatible(m, ds);
  check_class(m, class_index);
  if (grid_points < 2) throw std::invalid_argument("interaction grid_points must be >= 2");
  if (sample_cap < 2) throw std::invalid_argument("interaction sample_cap must be >= 2");
  const std::size_t d = ds.n_features();

  AttributionVector av;
  av.feature_names = ds.feature_names;
  av.method_id = "fi";
  av.phi.assign(d, 0.0);
  if (d < 2) {  // no partner features to interact with
    av.validate();
    return av;
  }

  // deterministic subsample (stream seeded 0 by convention), kept in
  // ascending row order
  std::vector<std::size_t> sample;
  if (ds.n_samples() > static_cast<std::size_t>(sample_cap)) {
    Substream rng(0, RngDomain::interaction_subsample, 0);
    std::vector<std::size_t> perm = rng.permutation(ds.n_samples());
    sample.assign(perm.begin(), perm.begin() + sample_cap);
    std::sort(sample.begin(), sample.end());
  } else {
    sample.resize(ds.n_samples());
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
  }
  const std::size_t s = sample.size();
  const auto t = static_cast<std::size_t>(grid_points);
  const FeatureStats st = feature_stats(ds);

  const auto value = [&](const std::vector<double>& row) {
    return m.predict_proba(row)[static_cast<std::size_t>(class_index)];
  };

  std::vector<double> f(s);
  for (std::size_t i = 0; i < s; ++i) f[i] = value(ds.rows[sample[i]]);
  double f_mean = 0.0;
  for (double v : f) f_mean += v;
  f_mean /= static_cast<double>(s);
  double denom = 0.0;
  for (double v : f) denom += (v - f_mean) * (v - f_mean);

  std::vector<double> row(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (st.max[j] <= st.min[j]) continue;  // constant feature: no interaction
    std::vector<double> grid(t);
    for (std::size_t g = 0; g < t; ++g)
      grid[g] = st.min[j] +
                (st.max[j] - st.min[j]) * static_cast<double>(g) / static_cast<double>(t - 1);
    std::vector<double> pd_grid(t, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
      row = ds.rows[sample[i]];
      for (std::size_t g = 0; g < t; ++g) {
        row[j] = grid[g];
        pd_grid[g] += value(row);
      }
    }
    for (double& v : pd_grid) v /= static_cast<double>(s);

    const auto pd_at = [&](double x) {
      if (x <= grid.front()) return pd_grid.front();
      if (x >= grid.back()) return pd_grid.back();
      const auto it = std::upper_bound(grid.begin(), grid.end(), x);
      const auto hi = static_cast<std::size_t>(it - grid.begin());
      const double frac = (x - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
      return pd_grid[hi - 1] + frac * (pd_grid[hi] - pd_grid[hi - 1]);
    };

    std::vector<double> pd_j(s), pd_rest(s);
    for (std::size_t i = 0; i < s; ++i) {
      pd_j[i] = pd_at(ds.rows[sample[i]][j]);
      row = ds.rows[sample[i]];
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        row[j] = ds.rows[sample[k]][j];
        acc += value(row);
      }
      pd_rest[i] = acc / static_cast<double>(s);
    }
    double mj = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      mj += pd_j[i];
      mr += pd_rest[i];
    }
    mj /= static_cast<double>(s);
    mr /= static_cast<double>(s);

    double num = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      const double gap = (f[i] - f_mean) - (pd_j[i] - mj) - (pd_rest[i] - mr);
      num += gap * gap;
    }
    av.phi[j] = denom > 1e-12 ? num / denom : 0.0;
  }
  av.validate();
  return av;
}

}  // namespace interp
