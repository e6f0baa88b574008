#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "interp/dataset.hpp"
#include "interp/explainers.hpp"
#include "interp/listspace.hpp"
#include "interp/model.hpp"
#include "interp/rng.hpp"

using interp::AttributionVector;
using interp::Dataset;
using interp::Predictor;

namespace {

Dataset make_ds(std::vector<std::vector<double>> rows, std::vector<int> targets,
                std::size_t n_classes) {
  Dataset ds;
  ds.rows = std::move(rows);
  ds.targets = std::move(targets);
  for (std::size_t j = 0; j < ds.rows[0].size(); ++j)
    ds.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t c = 0; c < n_classes; ++c)
    ds.class_names.push_back("c" + std::to_string(c));
  return ds;
}

/// Linear scorer over an explicit subset of features; untouched features
/// are genuinely never read, so their evaluations are bitwise identical.
struct LinearStub final : Predictor {
  std::size_t d = 0;
  double intercept = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;  // (feature, weight)

  std::size_t n_features() const override { return d; }
  std::size_t n_classes() const override { return 2; }
  std::vector<double> predict_proba(std::span<const double> row) const override {
    double p = intercept;
    for (const auto& [j, w] : terms) p += w * row[j];
    return {1.0 - p, p};
  }
};

/// Classifies by the sign of feature 0 and reads nothing else.
struct SignStub final : Predictor {
  std::size_t d = 3;
  std::size_t n_features() const override { return d; }
  std::size_t n_classes() const override { return 2; }
  std::vector<double> predict_proba(std::span<const double> row) const override {
    return row[0] > 0.0 ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0};
  }
};

/// p(c1) = 0.5 + gain * x0 * x1: a pure pairwise interaction.
struct ProductStub final : Predictor {
  double gain = 0.2;
  std::size_t n_features() const override { return 3; }
  std::size_t n_classes() const override { return 2; }
  std::vector<double> predict_proba(std::span<const double> row) const override {
    const double p = 0.5 + gain * row[0] * row[1];
    return {1.0 - p, p};
  }
};

struct ConstantStub final : Predictor {
  std::size_t d = 2;
  std::size_t n_features() const override { return d; }
  std::size_t n_classes() const override { return 2; }
  std::vector<double> predict_proba(std::span<const double>) const override {
    return {0.25, 0.75};
  }
};

/// Zero-mean background dataset: rows (1,..,1) and (-1,..,-1).
Dataset mirrored_ds(std::size_t d) {
  std::vector<std::vector<double>> rows{std::vector<double>(d, 1.0),
                                        std::vector<double>(d, -1.0)};
  return make_ds(std::move(rows), {0, 1}, 2);
}

double phi_sum(const AttributionVector& av) {
  double s = 0.0;
  for (double v : av.phi) s += v;
  return s;
}

}  // namespace

TEST_CASE("exact shapley recovers linear coefficients over a zero background") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.1;
  f.terms = {{0, 0.2}, {2, 0.1}};  // x1 never read
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> instance{1.0, 1.0, 1.0};

  const auto av = interp::exact_shapley(f, ds, instance, 1, 7);
  CHECK(av.method_id == "exact_shapley");
  REQUIRE(av.instance_index.has_value());
  CHECK(*av.instance_index == 7);
  CHECK(av.phi[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(av.phi[1] == 0.0);  // never-read feature: all marginals bitwise zero
  CHECK(av.phi[2] == doctest::Approx(0.1).epsilon(1e-9));

  // efficiency: sum of phi equals f(instance) - f(background)
  const double v_full = f.predict_proba(instance)[1];
  const double v_bg = f.predict_proba(std::vector<double>{0.0, 0.0, 0.0})[1];
  CHECK(phi_sum(av) == doctest::Approx(v_full - v_bg).epsilon(1e-12));
}

TEST_CASE("exact shapley treats symmetric features symmetrically") {
  LinearStub f;
  f.d = 2;
  f.intercept = 0.3;
  f.terms = {{0, 0.1}, {1, 0.1}};
  const Dataset ds = mirrored_ds(2);
  const auto av = interp::exact_shapley(f, ds, std::vector<double>{1.0, 1.0}, 1);
  CHECK(av.phi[0] == doctest::Approx(av.phi[1]).epsilon(1e-12));
  CHECK_FALSE(av.instance_index.has_value());
}

TEST_CASE("exact shapley on a single feature is the full value gap") {
  LinearStub f;
  f.d = 1;
  f.intercept = 0.2;
  f.terms = {{0, 0.4}};
  const Dataset ds = mirrored_ds(1);
  const auto av = interp::exact_shapley(f, ds, std::vector<double>{1.0}, 1);
  const double gap = f.predict_proba(std::vector<double>{1.0})[1] -
                     f.predict_proba(std::vector<double>{0.0})[1];
  CHECK(av.phi[0] == doctest::Approx(gap).epsilon(1e-15));
}

TEST_CASE("exact shapley refuses more than 12 features") {
  LinearStub f;
  f.d = 13;
  const Dataset ds = mirrored_ds(13);
  CHECK_THROWS_WITH_AS(
      interp::exact_shapley(f, ds, std::vector<double>(13, 1.0), 1),
      doctest::Contains("12"), std::invalid_argument);
}

TEST_CASE("shapley sampler matches the linear oracle closely") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.1;
  f.terms = {{0, 0.2}, {2, 0.1}};
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> instance{1.0, 1.0, 1.0};
  // Linear model: every permutation yields the same marginals, so even a
  // handful of samples reproduces the exact values.
  const auto av = interp::shapley_sampling(f, ds, instance, 50, 11, 1);
  CHECK(av.method_id == "shap");
  REQUIRE(av.seed.has_value());
  CHECK(*av.seed == 11);
  CHECK(av.phi[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(av.phi[1] == 0.0);  // never-read feature: exact zero marginals
  CHECK(av.phi[2] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("shapley sampler is seed-deterministic and seed-sensitive") {
  // An interaction makes the marginal of x0 depend on whether x1 joined
  // first, so the permutation mix (and hence the seed) shows in the output.
  ProductStub f;
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> inst{1.0, 1.0, 0.5};
  const auto a = interp::shapley_sampling(f, ds, inst, 101, 5, 1);
  const auto b = interp::shapley_sampling(f, ds, inst, 101, 5, 1);
  CHECK(a.phi == b.phi);
  const auto c = interp::shapley_sampling(f, ds, inst, 101, 6, 1);
  CHECK(a.phi != c.phi);
}

TEST_CASE("shapley sampler tracks exact values on a trained forest") {
  // 6-feature synthetic task with one interaction and two null features.
  interp::Substream rng(21, interp::RngDomain::harness, 4);
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (int i = 0; i < 150; ++i) {
    std::vector<double> r(6);
    for (double& v : r) v = 2.0 * rng.next_unit() - 1.0;
    rows.push_back(r);
    targets.push_back(r[0] + 0.8 * r[1] * r[2] + 0.5 * r[3] > 0.0 ? 1 : 0);
  }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);
  interp::ModelSpec spec;
  spec.kind = interp::ModelKind::random_forest;
  spec.n_trees = 20;
  spec.max_depth = 5;
  spec.seed = 9;
  const interp::Model m = interp::train(ds, spec);

  const std::vector<double>& inst = ds.rows[3];
  const auto exact = interp::exact_shapley(m, ds, inst, 1);
  const auto sampled = interp::shapley_sampling(m, ds, inst, 2000, 3, 1);
  for (std::size_t j = 0; j < 6; ++j) {
    if (std::abs(exact.phi[j]) <= 0.01) continue;
    const double rel = std::abs(sampled.phi[j] - exact.phi[j]) / std::abs(exact.phi[j]);
    CAPTURE(j);
    CHECK(rel <= 0.05);
  }
  // both satisfy efficiency against the same value function
  CHECK(phi_sum(exact) == doctest::Approx(phi_sum(sampled)).epsilon(1e-9));
}

TEST_CASE("pfi scores the sign feature at one half and ignores the rest") {
  SignStub f;
  const Dataset ds = make_ds({{-3.0, 9.0, 5.0},
                              {-2.0, 8.0, 5.0},
                              {-1.0, 7.0, 5.0},
                              {1.0, 6.0, 5.0},
                              {2.0, 5.5, 5.0},
                              {3.0, 4.0, 5.0}},
                             {0, 0, 0, 1, 1, 1}, 2);
  const auto av = interp::pfi(f, ds, 2000, 13);
  CHECK(av.method_id == "pfi");
  REQUIRE(av.seed.has_value());
  CHECK(*av.seed == 13);
  // Permuting x0 keeps 3 negatives and 3 positives, so each row keeps its
  // original predicted sign with probability 1/2: expected drop is 0.5.
  CHECK(av.phi[0] == doctest::Approx(0.5).epsilon(0.06));
  // x1 varies but is never read; x2 is constant. Baseline accuracy is
  // exactly 1, so both drops are exactly zero.
  CHECK(av.phi[1] == 0.0);
  CHECK(av.phi[2] == 0.0);
}

TEST_CASE("pfi is deterministic per seed and validates repeats") {
  SignStub f;
  const Dataset ds = make_ds({{-1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}}, {0, 1}, 2);
  const auto a = interp::pfi(f, ds, 10, 1);
  const auto b = interp::pfi(f, ds, 10, 1);
  CHECK(a.phi == b.phi);
  CHECK_THROWS_AS(interp::pfi(f, ds, 0, 1), std::invalid_argument);
}

TEST_CASE("lime recovers mask-linear structure") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.1;
  f.terms = {{0, 0.2}, {2, 0.1}};
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> instance{1.0, 1.0, 1.0};

  const auto av =
      interp::lime(f, ds, instance, 200, interp::default_kernel_width(3), 17, 1, 4);
  CHECK(av.method_id == "lime");
  REQUIRE(av.seed.has_value());
  CHECK(*av.seed == 17);
  REQUIRE(av.instance_index.has_value());
  CHECK(*av.instance_index == 4);
  CHECK(av.warning.empty());

  // The target is exactly linear in the mask, so the ridge fit lands on the
  // coefficients up to the small penalty distortion.
  CHECK(av.phi[0] == doctest::Approx(0.2).epsilon(0.1));
  CHECK(std::abs(av.phi[1]) <= 0.02);
  CHECK(av.phi[2] == doctest::Approx(0.1).epsilon(0.1));
  REQUIRE(av.residual_epsilon.has_value());
  CHECK(*av.residual_epsilon >= 0.0);
  CHECK(*av.residual_epsilon <= 0.01);

  const auto list = interp::to_list(av);
  CHECK(list.ordered_features ==
        std::vector<std::string>{"x0", "x2", "x1"});
}

TEST_CASE("lime is deterministic per seed") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.2;
  f.terms = {{0, 0.3}, {1, -0.1}};
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> instance{1.0, -1.0, 1.0};
  const auto a = interp::lime(f, ds, instance, 64, 1.2, 5, 1);
  const auto b = interp::lime(f, ds, instance, 64, 1.2, 5, 1);
  CHECK(a.phi == b.phi);
  const auto c = interp::lime(f, ds, instance, 64, 1.2, 6, 1);
  CHECK(a.phi != c.phi);
}

TEST_CASE("lime preconditions") {
  LinearStub f;
  f.d = 3;
  const Dataset ds = mirrored_ds(3);
  const std::vector<double> inst{1.0, 1.0, 1.0};
  CHECK_THROWS_WITH_AS(interp::lime(f, ds, inst, 3, 1.0, 0, 1),
                       doctest::Contains("n_perturb"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(interp::lime(f, ds, inst, 10, 0.0, 0, 1),
                       doctest::Contains("kernel width"), std::invalid_argument);
  CHECK_THROWS_AS(interp::lime(f, ds, inst, 10, 1.0, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(interp::lime(f, ds, std::vector<double>{1.0}, 10, 1.0, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("default kernel width follows the root-of-dimension convention") {
  CHECK(interp::default_kernel_width(4) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(interp::default_kernel_width(16) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pdp importance equals the closed-form flatness of a linear model") {
  LinearStub f;
  f.d = 2;
  f.intercept = 0.1;
  f.terms = {{0, 0.25}};  // x1 never read
  const Dataset ds = make_ds({{0.0, 4.0}, {1.0, 3.0}, {2.0, 2.0}, {3.0, 1.0}},
                             {0, 0, 1, 1}, 2);
  const auto av = interp::pdp_importance(f, ds, 4, 1);
  CHECK(av.method_id == "pdp");
  // Grid over [0,3] with 4 points is {0,1,2,3}; the PD curve is
  // 0.25 * grid + const, so phi = 0.25 * popstd({0,1,2,3}).
  const double expected = 0.25 * std::sqrt(5.0 / 4.0);
  CHECK(av.phi[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(av.phi[1] == 0.0);  // unused feature: bitwise-flat curve
}

TEST_CASE("pdp handles constant features and bad grids") {
  LinearStub f;
  f.d = 2;
  f.terms = {{0, 0.1}, {1, 0.9}};
  const Dataset ds = make_ds({{1.0, 7.0}, {2.0, 7.0}}, {0, 1}, 2);
  const auto av = interp::pdp_importance(f, ds, 8, 1);
  CHECK(av.phi[1] == 0.0);  // constant feature: degenerate grid
  CHECK(av.phi[0] > 0.0);
  CHECK_THROWS_AS(interp::pdp_importance(f, ds, 1, 1), std::invalid_argument);
}

TEST_CASE("ale importance matches the quantile-bin oracle for a linear model") {
  LinearStub f;
  f.d = 2;
  f.intercept = 0.05;
  f.terms = {{0, 0.1}};  // x1 never read
  std::vector<std::vector<double>> rows;
  for (int i = 1; i <= 8; ++i) rows.push_back({static_cast<double>(i), 100.0 - i});
  const Dataset ds = make_ds(std::move(rows), {0, 0, 0, 0, 1, 1, 1, 1}, 2);

  const auto av = interp::ale_importance(f, ds, 4, 1);
  CHECK(av.method_id == "ale");
  // Quantile edges of 1..8 at {0,.25,.5,.75,1} are {1, 2.75, 4.5, 6.25, 8};
  // each bin holds 2 rows. For a linear model the centered cumulative curve
  // per bin is w * (edge_k1 - edge_0) minus its weighted mean, giving
  // phi = 0.1 * sqrt(3.828125) exactly.
  const std::vector<double> curve{1.75, 3.5, 5.25, 7.0};
  double mean = 0.0;
  for (double v : curve) mean += v;
  mean /= 4.0;
  double ss = 0.0;
  for (double v : curve) ss += (v - mean) * (v - mean);
  const double expected = 0.1 * std::sqrt(ss / 4.0);
  CHECK(av.phi[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(av.phi[1] == 0.0);  // unused feature: all local effects bitwise zero

  CHECK_THROWS_AS(interp::ale_importance(f, ds, 0, 1), std::invalid_argument);
}

TEST_CASE("ale ranks additive contributions by slope") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.2;
  f.terms = {{0, 0.3}, {1, 0.1}};
  interp::Substream rng(2, interp::RngDomain::harness, 8);
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({rng.next_unit(), rng.next_unit(), rng.next_unit()});
    targets.push_back(i % 2);
  }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);
  const auto av = interp::ale_importance(f, ds, 5, 1);
  CHECK(av.phi[0] > av.phi[1]);
  CHECK(av.phi[1] > av.phi[2]);
  CHECK(av.phi[2] == 0.0);
}

TEST_CASE("gam importance recovers exact additive component variances") {
  LinearStub f;
  f.d = 2;
  f.intercept = 0.1;
  f.terms = {{0, 0.2}, {1, 0.05}};
  // Full 4x4 grid of values 0..3; 4 equal-width bins isolate each value.
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      rows.push_back({static_cast<double>(a), static_cast<double>(b)});
      targets.push_back((a + b) % 2);
    }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);

  const auto av = interp::gam_importance(f, ds, 4, 1);
  CHECK(av.method_id == "gam");
  CHECK(av.warning.empty());
  // Component variances: w^2 * Var({0,1,2,3}) with Var = 1.25.
  CHECK(av.phi[0] == doctest::Approx(0.2 * 0.2 * 1.25).epsilon(1e-6));
  CHECK(av.phi[1] == doctest::Approx(0.05 * 0.05 * 1.25).epsilon(1e-6));
  REQUIRE(av.residual_epsilon.has_value());
  CHECK(*av.residual_epsilon <= 1e-8);  // exactly additive target

  const auto again = interp::gam_importance(f, ds, 4, 1);
  CHECK(av.phi == again.phi);  // no randomness anywhere

  CHECK_THROWS_AS(interp::gam_importance(f, ds, 1, 1), std::invalid_argument);
}

TEST_CASE("gam on a constant model is exactly zero with zero residual") {
  ConstantStub f;
  const Dataset ds = make_ds({{0.0, 1.0}, {1.0, 0.0}, {2.0, 2.0}}, {0, 1, 0}, 2);
  const auto av = interp::gam_importance(f, ds, 2, 1);
  CHECK(av.phi[0] == 0.0);
  CHECK(av.phi[1] == 0.0);
  CHECK(*av.residual_epsilon == 0.0);
}

TEST_CASE("surrogate importance concentrates on a single-split model") {
  // Depth-1 tree model: only feature 1 drives the labels.
  const Dataset ds = make_ds({{5.0, 0.0}, {4.0, 1.0}, {3.0, 0.2}, {2.0, 0.9},
                              {1.0, 0.1}, {0.0, 0.8}},
                             {0, 1, 0, 1, 0, 1}, 2);
  interp::ModelSpec spec;
  spec.kind = interp::ModelKind::decision_tree;
  spec.max_depth = 1;
  const interp::Model m = interp::train(ds, spec);
  REQUIRE(interp::accuracy(m, ds) == 1.0);  // the split must exist

  const auto av = interp::surrogate_importance(m, ds, 3);
  CHECK(av.method_id == "gsm");
  CHECK(av.phi[0] == 0.0);
  CHECK(av.phi[1] == 1.0);  // all normalized importance on the used feature
  REQUIRE(av.residual_epsilon.has_value());
  CHECK(*av.residual_epsilon == 0.0);  // surrogate reproduces the labeling
}

TEST_CASE("surrogate importance of a constant model stays all-zero") {
  ConstantStub f;
  const Dataset ds = make_ds({{0.0, 1.0}, {1.0, 0.0}, {2.0, 2.0}, {3.0, 1.5}},
                             {0, 1, 0, 1}, 2);
  const auto av = interp::surrogate_importance(f, ds, 2);
  CHECK(av.phi == std::vector<double>{0.0, 0.0});
  CHECK(*av.residual_epsilon == 0.0);
  CHECK_THROWS_AS(interp::surrogate_importance(f, ds, 0), std::invalid_argument);
}

TEST_CASE("interaction importance isolates a pure product term") {
  ProductStub f;
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0})
      for (int rep = 0; rep < 3; ++rep) {
        rows.push_back({a, b, static_cast<double>(rep)});
        targets.push_back(a * b > 0.0 ? 1 : 0);
      }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);

  const auto av = interp::interaction_importance(f, ds, 2, 100, 1);
  CHECK(av.method_id == "fi");
  // x0 and x1 interact with everything they have (H^2 = 1); x2 is inert.
  CHECK(av.phi[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(av.phi[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(av.phi[0] == doctest::Approx(av.phi[1]).epsilon(1e-9));
  CHECK(std::abs(av.phi[2]) <= 1e-12);
}

TEST_CASE("interaction importance of an additive model is near zero") {
  LinearStub f;
  f.d = 3;
  f.intercept = 0.3;
  f.terms = {{0, 0.2}, {1, -0.15}};
  interp::Substream rng(5, interp::RngDomain::harness, 6);
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (int i = 0; i < 80; ++i) {
    rows.push_back({rng.next_unit(), rng.next_unit(), rng.next_unit()});
    targets.push_back(i % 2);
  }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);
  const auto av = interp::interaction_importance(f, ds, 5, 40, 1);
  CHECK(std::abs(av.phi[0]) <= 0.05);
  CHECK(std::abs(av.phi[1]) <= 0.05);
  CHECK(std::abs(av.phi[2]) <= 1e-12);  // never read at all
}

TEST_CASE("interaction importance edge cases") {
  LinearStub f;
  f.d = 1;
  f.terms = {{0, 0.5}};
  const Dataset single = mirrored_ds(1);
  const auto av = interp::interaction_importance(f, single, 3, 10, 1);
  CHECK(av.phi == std::vector<double>{0.0});  // no partner features

  LinearStub g;
  g.d = 2;
  g.terms = {{0, 0.5}};
  const Dataset two = mirrored_ds(2);
  CHECK_THROWS_AS(interp::interaction_importance(g, two, 1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(interp::interaction_importance(g, two, 3, 1, 1), std::invalid_argument);

  // constant feature: skipped, exact zero
  LinearStub h;
  h.d = 2;
  h.terms = {{0, 0.5}};
  const Dataset with_const = make_ds({{0.0, 3.0}, {1.0, 3.0}, {2.0, 3.0}}, {0, 1, 0}, 2);
  const auto avc = interp::interaction_importance(h, with_const, 3, 10, 1);
  CHECK(avc.phi[1] == 0.0);
}

TEST_CASE("interaction importance subsample is deterministic") {
  ProductStub f;
  interp::Substream rng(14, interp::RngDomain::harness, 1);
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0,
                    rng.next_unit()});
    targets.push_back(i % 2);
  }
  const Dataset ds = make_ds(std::move(rows), std::move(targets), 2);
  const auto a = interp::interaction_importance(f, ds, 4, 50, 1);
  const auto b = interp::interaction_importance(f, ds, 4, 50, 1);
  CHECK(a.phi == b.phi);
}

TEST_CASE("explainers reject mismatched datasets and class indices") {
  LinearStub f;
  f.d = 3;
  f.terms = {{0, 0.1}};
  const Dataset wrong = mirrored_ds(2);
  const std::vector<double> inst3{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(interp::pfi(f, wrong, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(interp::pdp_importance(f, wrong, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(interp::exact_shapley(f, wrong, std::vector<double>{1.0, 1.0}, 0),
                  std::invalid_argument);

  const Dataset right = mirrored_ds(3);
  CHECK_THROWS_AS(interp::exact_shapley(f, right, inst3, 2), std::invalid_argument);
  CHECK_THROWS_AS(interp::pdp_importance(f, right, 4, -1), std::invalid_argument);
  CHECK_THROWS_AS(interp::shapley_sampling(f, right, inst3, 0, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("attribution vectors serialize with all optional fields") {
  AttributionVector av;
  av.feature_names = {"a", "b"};
  av.phi = {0.25, -0.5};
  av.method_id = "lime";
  av.seed = 42;
  av.instance_index = 3;
  av.residual_epsilon = 0.015625;
  av.warning = "ridge penalty escalated";

  const auto back = AttributionVector::from_json_string(av.to_json_string());
  CHECK(back.feature_names == av.feature_names);
  CHECK(back.phi == av.phi);  // doubles survive bitwise through json
  CHECK(back.method_id == av.method_id);
  CHECK(*back.seed == 42);
  CHECK(*back.instance_index == 3);
  CHECK(*back.residual_epsilon == 0.015625);
  CHECK(back.warning == av.warning);

  AttributionVector bare;
  bare.feature_names = {"a"};
  bare.phi = {1.0};
  bare.method_id = "pdp";
  const auto bare_back = AttributionVector::from_json_string(bare.to_json_string());
  CHECK_FALSE(bare_back.seed.has_value());
  CHECK_FALSE(bare_back.instance_index.has_value());
  CHECK_FALSE(bare_back.residual_epsilon.has_value());
  CHECK(bare_back.warning.empty());

  const std::string path = "/tmp/interp_test_attribution.json";
  interp::save_attribution(av, path);
  const auto loaded = interp::load_attribution(path);
  CHECK(loaded.phi == av.phi);
}

TEST_CASE("attribution validation rejects malformed vectors") {
  AttributionVector av;
  av.feature_names = {"a", "b"};
  av.phi = {0.1};
  av.method_id = "pfi";
  CHECK_THROWS_WITH_AS(av.validate(), doctest::Contains("phi length"),
                       std::invalid_argument);
  av.phi = {0.1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_WITH_AS(av.validate(), doctest::Contains("non-finite"),
                       std::invalid_argument);
  av.phi = {0.1, 0.2};
  av.method_id = "";
  CHECK_THROWS_AS(av.validate(), std::invalid_argument);
  av.method_id = "pfi";
  av.residual_epsilon = -0.5;
  CHECK_THROWS_AS(av.validate(), std::invalid_argument);
  av.residual_epsilon = 0.0;
  av.validate();
}
