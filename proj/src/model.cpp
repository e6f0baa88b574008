#include "interp/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "interp/rng.hpp"

namespace interp {

using json = nlohmann::ordered_json;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::logistic: return "logistic";
    case ModelKind::gaussian_nb: return "gaussian_nb";
    case ModelKind::gbdt: return "gbdt";
  }
  throw std::invalid_argument("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "decision_tree" || name == "dt") return ModelKind::decision_tree;
  if (name == "random_forest" || name == "rf") return ModelKind::random_forest;
  if (name == "logistic" || name == "logis") return ModelKind::logistic;
  if (name == "gaussian_nb" || name == "gnb") return ModelKind::gaussian_nb;
  if (name == "gbdt") return ModelKind::gbdt;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw std::invalid_argument("learning_rate must be in (0,1]");
  if (n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
  if (l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

int Predictor::predict_class(std::span<const double> row) const {
  const std::vector<double> p = predict_proba(row);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = c;
  return static_cast<int>(best);
}

namespace {

void check_row(std::span<const double> row, std::size_t expected) {
  if (row.size() != expected)
    throw std::invalid_argument("row has " + std::to_string(row.size()) +
                                " values, model expects " + std::to_string(expected));
  for (double v : row)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in prediction row");
}

void softmax_inplace(std::vector<double>& scores) {
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - hi);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

/// Runs fn(i) for i in [0, n) on a few threads; fn(i) must only write to
/// slot i of its output, so the result is identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(n, std::min<std::size_t>(hw, 8));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

Model train_decision_tree(const Dataset& ds, const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.feature_names = ds.feature_names;
  m.class_names = ds.class_names;
  TreeParams params;
  std::vector<std::size_t> all(ds.n_samples());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  params.tree.train(ds.rows, ds.targets, ds.n_classes(), all, spec.max_depth);
  m.params = std::move(params);
  return m;
}

Model train_random_forest(const Dataset& ds, const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.feature_names = ds.feature_names;
  m.class_names = ds.class_names;
  ForestParams params;
  params.trees.resize(static_cast<std::size_t>(spec.n_trees));
  const std::size_t n = ds.n_samples();
  const std::size_t mtry =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(ds.n_features())));
  parallel_for(params.trees.size(), [&](std::size_t t) {
    Substream rng(spec.seed, RngDomain::forest_tree, t);
    std::vector<std::size_t> bootstrap(n);
    for (std::size_t i = 0; i < n; ++i)
      bootstrap[i] = static_cast<std::size_t>(rng.next_below(n));
    params.trees[t].train(ds.rows, ds.targets, ds.n_classes(), bootstrap, spec.max_depth, mtry,
                          &rng);
  });
  m.params = std::move(params);
  return m;
}

Model train_logistic(const Dataset& ds, const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.feature_names = ds.feature_names;
  m.class_names = ds.class_names;

  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();
  const std::size_t k = ds.n_classes();

  LogisticParams params;
  const FeatureStats st = feature_stats(ds);
  params.feature_mean = st.mean;
  params.feature_scale.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    params.feature_scale[j] = st.stddev[j] > 0.0 ? st.stddev[j] : 1.0;

  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      x[i][j] = (ds.rows[i][j] - params.feature_mean[j]) / params.feature_scale[j];

  params.weights.assign(k, std::vector<double>(d + 1, 0.0));
  std::vector<double> scores(k);
  std::vector<std::vector<double>> grad(k, std::vector<double>(d + 1));

  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        double s = params.weights[c][d];
        for (std::size_t j = 0; j < d; ++j) s += params.weights[c][j] * x[i][j];
        scores[c] = s;
      }
      softmax_inplace(scores);
      for (std::size_t c = 0; c < k; ++c) {
        const double err = scores[c] - (ds.targets[i] == static_cast<int>(c) ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad[c][j] += err * x[i][j];
        grad[c][d] += err;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j <= d; ++j) {
        double g = grad[c][j] / static_cast<double>(n);
        if (j < d) g += spec.l2_penalty * params.weights[c][j];  // bias unpenalized
        params.weights[c][j] -= spec.learning_rate * g;
      }
    }
  }
  m.params = std::move(params);
  return m;
}

Model train_gaussian_nb(const Dataset& ds, const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.feature_names = ds.feature_names;
  m.class_names = ds.class_names;

  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();
  const std::size_t k = ds.n_classes();

  GaussianNbParams params;
  params.log_prior.resize(k);
  params.mean.assign(k, std::vector<double>(d, 0.0));
  params.variance.assign(k, std::vector<double>(d, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(ds.targets[i])];

  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(ds.targets[i]);
    for (std::size_t j = 0; j < d; ++j) params.mean[c][j] += ds.rows[i][j];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) params.mean[c][j] /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(ds.targets[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dlt = ds.rows[i][j] - params.mean[c][j];
      params.variance[c][j] += dlt * dlt;
    }
  }
  // smoothing keyed to the largest overall feature variance, so constant
  // features do not produce zero-variance likelihoods
  const FeatureStats st = feature_stats(ds);
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) max_var = std::max(max_var, st.stddev[j] * st.stddev[j]);
  const double smoothing = 1e-9 * (max_var > 0.0 ? max_var : 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    params.log_prior[c] =
        std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j)
      params.variance[c][j] = params.variance[c][j] / static_cast<double>(counts[c]) + smoothing;
  }
  m.params = std::move(params);
  return m;
}

Model train_gbdt(const Dataset& ds, const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.feature_names = ds.feature_names;
  m.class_names = ds.class_names;

  const std::size_t n = ds.n_samples();
  const std::size_t k = ds.n_classes();

  GbdtParams params;
  params.learning_rate = spec.learning_rate;
  params.trees.resize(static_cast<std::size_t>(spec.n_rounds));

  std::vector<std::vector<double>> scores(n, std::vector<double>(k, 0.0));
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<double> residual(n);
  std::vector<double> probs(k);

  for (int round = 0; round < spec.n_rounds; ++round) {
    auto& round_trees = params.trees[static_cast<std::size_t>(round)];
    round_trees.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        probs.assign(scores[i].begin(), scores[i].end());
        softmax_inplace(probs);
        residual[i] = (ds.targets[i] == static_cast<int>(c) ? 1.0 : 0.0) - probs[c];
      }
      RegressionTree& tree = round_trees[c];
      tree.train(ds.rows, residual, all, spec.max_depth);
      // re-estimate leaf values with the one-step Newton update for the
      // softmax objective
      auto& nodes = tree.nodes();
      const auto& members = tree.leaf_members();
      for (std::size_t node = 0; node < nodes.size(); ++node) {
        if (nodes[node].feature >= 0) continue;
        double num = 0.0, den = 0.0;
        for (std::size_t i : members[node]) {
          num += residual[i];
          den += std::abs(residual[i]) * (1.0 - std::abs(residual[i]));
        }
        const double k_d = static_cast<double>(k);
        const double value =
            (den > 1e-12) ? ((k_d - 1.0) / k_d) * (num / den) : 0.0;
        nodes[node].value = {value};
      }
      for (std::size_t i = 0; i < n; ++i)
        scores[i][c] += spec.learning_rate * tree.predict(ds.rows[i]);
    }
  }
  m.params = std::move(params);
  return m;
}

}  // namespace

Model train(const Dataset& ds, const ModelSpec& spec) {
  spec.validate();
  ds.validate();
  std::vector<bool> present(ds.n_classes(), false);
  for (int t : ds.targets) present[static_cast<std::size_t>(t)] = true;
  std::size_t observed = 0;
  for (bool p : present) observed += p ? 1 : 0;
  if (observed < 2)
    throw std::invalid_argument("training requires at least 2 observed classes");

  switch (spec.kind) {
    case ModelKind::decision_tree: return train_decision_tree(ds, spec);
    case ModelKind::random_forest: return train_random_forest(ds, spec);
    case ModelKind::logistic: return train_logistic(ds, spec);
    case ModelKind::gaussian_nb: return train_gaussian_nb(ds, spec);
    case ModelKind::gbdt: return train_gbdt(ds, spec);
  }
  throw std::invalid_argument("unknown model kind");
}

std::vector<double> Model::predict_proba(std::span<const double> row) const {
  check_row(row, n_features());
  if (const auto* tree = std::get_if<TreeParams>(&params)) {
    return tree->tree.predict_dist(row);
  }
  if (const auto* forest = std::get_if<ForestParams>(&params)) {
    std::vector<double> acc(n_classes(), 0.0);
    for (const auto& tree : forest->trees) {
      const std::vector<double>& dist = tree.predict_dist(row);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += dist[c];
    }
    for (double& v : acc) v /= static_cast<double>(forest->trees.size());
    return acc;
  }
  if (const auto* logistic = std::get_if<LogisticParams>(&params)) {
    const std::size_t d = n_features();
    std::vector<double> scores(n_classes());
    for (std::size_t c = 0; c < scores.size(); ++c) {
      double s = logistic->weights[c][d];
      for (std::size_t j = 0; j < d; ++j) {
        const double x = (row[j] - logistic->feature_mean[j]) / logistic->feature_scale[j];
        s += logistic->weights[c][j] * x;
      }
      scores[c] = s;
    }
    softmax_inplace(scores);
    return scores;
  }
  if (const auto* gnb = std::get_if<GaussianNbParams>(&params)) {
    std::vector<double> log_joint(n_classes());
    for (std::size_t c = 0; c < log_joint.size(); ++c) {
      double s = gnb->log_prior[c];
      for (std::size_t j = 0; j < n_features(); ++j) {
        const double var = gnb->variance[c][j];
        const double dlt = row[j] - gnb->mean[c][j];
        s += -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - dlt * dlt / (2.0 * var);
      }
      log_joint[c] = s;
    }
    softmax_inplace(log_joint);
    return log_joint;
  }
  const auto& gbdt = std::get<GbdtParams>(params);
  std::vector<double> scores(n_classes(), 0.0);
  for (const auto& round_trees : gbdt.trees)
    for (std::size_t c = 0; c < scores.size(); ++c)
      scores[c] += gbdt.learning_rate * round_trees[c].predict(row);
  softmax_inplace(scores);
  return scores;
}

std::vector<std::size_t> resolve_columns(const Model& m, const std::vector<std::string>& names) {
  if (names.size() != m.feature_names.size())
    throw std::invalid_argument("schema mismatch: got " + std::to_string(names.size()) +
                                " features, model expects " +
                                std::to_string(m.feature_names.size()));
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < m.feature_names.size(); ++j) position[m.feature_names[j]] = j;
  std::vector<std::size_t> mapping(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto it = position.find(names[j]);
    if (it == position.end())
      throw std::invalid_argument("schema mismatch: feature '" + names[j] +
                                  "' not known to the model");
    mapping[j] = it->second;
  }
  return mapping;
}

std::vector<double> Model::predict_proba_named(std::span<const double> row,
                                               std::span<const std::string> names) const {
  const std::vector<std::string> name_vec(names.begin(), names.end());
  const std::vector<std::size_t> mapping = resolve_columns(*this, name_vec);
  std::vector<double> reordered(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) reordered[mapping[j]] = row[j];
  return predict_proba(reordered);
}

Dataset align_to_model(const Model& m, const Dataset& ds) {
  if (ds.feature_names == m.feature_names) return ds;
  const std::vector<std::size_t> mapping = resolve_columns(m, ds.feature_names);
  Dataset out;
  out.feature_names = m.feature_names;
  out.class_names = ds.class_names;
  out.targets = ds.targets;
  out.rows.resize(ds.n_samples(), std::vector<double>(ds.n_features()));
  for (std::size_t i = 0; i < ds.n_samples(); ++i)
    for (std::size_t j = 0; j < ds.n_features(); ++j)
      out.rows[i][mapping[j]] = ds.rows[i][j];
  return out;
}

double accuracy(const Model& m, const Dataset& ds) {
  const Dataset aligned = align_to_model(m, ds);
  return accuracy(static_cast<const Predictor&>(m), aligned);
}

double accuracy(const Predictor& m, const Dataset& ds) {
  if (ds.n_features() != m.n_features())
    throw std::invalid_argument("schema mismatch: dataset has " +
                                std::to_string(ds.n_features()) + " features, model expects " +
                                std::to_string(m.n_features()));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.n_samples(); ++i)
    if (m.predict_class(ds.rows[i]) == ds.targets[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.n_samples());
}

namespace {

json nodes_to_json(const std::vector<TreeNode>& nodes) {
  json arr = json::array();
  for (const TreeNode& n : nodes) {
    json o;
    o["f"] = n.feature;
    o["t"] = n.threshold;
    o["l"] = n.left;
    o["r"] = n.right;
    o["v"] = n.value;
    o["imp"] = n.impurity;
    o["n"] = n.n_samples;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<TreeNode> nodes_from_json(const json& arr) {
  std::vector<TreeNode> nodes;
  for (const auto& o : arr) {
    TreeNode n;
    n.feature = o.at("f").get<int>();
    n.threshold = o.at("t").get<double>();
    n.left = o.at("l").get<int>();
    n.right = o.at("r").get<int>();
    n.value = o.at("v").get<std::vector<double>>();
    n.impurity = o.at("imp").get<double>();
    n.n_samples = o.at("n").get<std::size_t>();
    nodes.push_back(std::move(n));
  }
  return nodes;
}

}  // namespace

std::string Model::to_json_string() const {
  json root;
  root["format"] = "interp.model/1";
  json spec_json;
  spec_json["kind"] = to_string(spec.kind);
  spec_json["hyperparameters"] = {{"max_depth", spec.max_depth},
                                  {"n_trees", spec.n_trees},
                                  {"learning_rate", spec.learning_rate},
                                  {"n_rounds", spec.n_rounds},
                                  {"l2_penalty", spec.l2_penalty},
                                  {"max_iterations", spec.max_iterations}};
  spec_json["seed"] = spec.seed;
  root["spec"] = std::move(spec_json);
  root["feature_names"] = feature_names;
  root["class_names"] = class_names;

  json p;
  if (const auto* tree = std::get_if<TreeParams>(&params)) {
    p["nodes"] = nodes_to_json(tree->tree.nodes());
  } else if (const auto* forest = std::get_if<ForestParams>(&params)) {
    json trees = json::array();
    for (const auto& t : forest->trees) trees.push_back(nodes_to_json(t.nodes()));
    p["trees"] = std::move(trees);
  } else if (const auto* logistic = std::get_if<LogisticParams>(&params)) {
    p["weights"] = logistic->weights;
    p["feature_mean"] = logistic->feature_mean;
    p["feature_scale"] = logistic->feature_scale;
  } else if (const auto* gnb = std::get_if<GaussianNbParams>(&params)) {
    p["log_prior"] = gnb->log_prior;
    p["mean"] = gnb->mean;
    p["variance"] = gnb->variance;
  } else {
    const auto& gbdt = std::get<GbdtParams>(params);
    p["learning_rate"] = gbdt.learning_rate;
    json rounds = json::array();
    for (const auto& round_trees : gbdt.trees) {
      json per_class = json::array();
      for (const auto& t : round_trees) per_class.push_back(nodes_to_json(t.nodes()));
      rounds.push_back(std::move(per_class));
    }
    p["rounds"] = std::move(rounds);
  }
  root["params"] = std::move(p);
  return root.dump(2);
}

Model Model::from_json_string(const std::string& text) {
  const json root = json::parse(text);
  if (root.at("format").get<std::string>() != "interp.model/1")
    throw std::runtime_error("unsupported model format");
  Model m;
  const json& spec_json = root.at("spec");
  m.spec.kind = model_kind_from_string(spec_json.at("kind").get<std::string>());
  const json& hp = spec_json.at("hyperparameters");
  m.spec.max_depth = hp.at("max_depth").get<int>();
  m.spec.n_trees = hp.at("n_trees").get<int>();
  m.spec.learning_rate = hp.at("learning_rate").get<double>();
  m.spec.n_rounds = hp.at("n_rounds").get<int>();
  m.spec.l2_penalty = hp.at("l2_penalty").get<double>();
  m.spec.max_iterations = hp.at("max_iterations").get<int>();
  m.spec.seed = spec_json.at("seed").get<std::uint64_t>();
  m.feature_names = root.at("feature_names").get<std::vector<std::string>>();
  m.class_names = root.at("class_names").get<std::vector<std::string>>();

  const json& p = root.at("params");
  switch (m.spec.kind) {
    case ModelKind::decision_tree: {
      TreeParams params;
      params.tree.set_nodes(nodes_from_json(p.at("nodes")));
      m.params = std::move(params);
      break;
    }
    case ModelKind::random_forest: {
      ForestParams params;
      for (const auto& t : p.at("trees")) {
        ClassificationTree tree;
        tree.set_nodes(nodes_from_json(t));
        params.trees.push_back(std::move(tree));
      }
      m.params = std::move(params);
      break;
    }
    case ModelKind::logistic: {
      LogisticParams params;
      params.weights = p.at("weights").get<std::vector<std::vector<double>>>();
      params.feature_mean = p.at("feature_mean").get<std::vector<double>>();
      params.feature_scale = p.at("feature_scale").get<std::vector<double>>();
      m.params = std::move(params);
      break;
    }
    case ModelKind::gaussian_nb: {
      GaussianNbParams params;
      params.log_prior = p.at("log_prior").get<std::vector<double>>();
      params.mean = p.at("mean").get<std::vector<std::vector<double>>>();
      params.variance = p.at("variance").get<std::vector<std::vector<double>>>();
      m.params = std::move(params);
      break;
    }
    case ModelKind::gbdt: {
      GbdtParams params;
      params.learning_rate = p.at("learning_rate").get<double>();
      for (const auto& round : p.at("rounds")) {
        std::vector<RegressionTree> per_class;
        for (const auto& t : round) {
          RegressionTree tree;
          tree.nodes() = nodes_from_json(t);
          per_class.push_back(std::move(tree));
        }
        params.trees.push_back(std::move(per_class));
      }
      m.params = std::move(params);
      break;
    }
  }
  return m;
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << m.to_json_string() << '\n';
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Model::from_json_string(buf.str());
}

}  // namespace interp
