#include "interp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "interp/rng.hpp"

namespace interp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
  return out;
}

void Dataset::validate() const {
  if (feature_names.empty()) throw std::invalid_argument("dataset has no features");
  if (rows.size() < 2)
    throw std::invalid_argument("dataset needs at least 2 samples, got " +
                                std::to_string(rows.size()));
  std::set<std::string> seen;
  for (const auto& name : feature_names) {
    if (name.empty()) throw std::invalid_argument("empty feature name");
    if (!seen.insert(name).second)
      throw std::invalid_argument("duplicate feature name '" + name + "'");
  }
  if (targets.size() != rows.size())
    throw std::invalid_argument("target count does not match row count");
  if (class_names.empty()) throw std::invalid_argument("dataset has no classes");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != feature_names.size())
      throw std::invalid_argument("row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " values, expected " +
                                  std::to_string(feature_names.size()));
    for (double v : rows[i])
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite value in row " + std::to_string(i + 1));
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= class_names.size())
      throw std::invalid_argument("target out of range in row " + std::to_string(i + 1));
  }
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw std::runtime_error(path + ": missing header row");

  const std::vector<std::string> header_cells = split_line(line);
  std::vector<std::string> header;
  header.reserve(header_cells.size());
  for (const auto& c : header_cells) header.push_back(trim(c));

  std::set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty()) throw std::runtime_error(path + ": empty column name in header");
    if (!seen.insert(h).second)
      throw std::runtime_error(path + ": duplicate column '" + h + "' in header");
  }

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end())
    throw std::runtime_error(path + ": target column '" + target_column + "' not found");
  const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());

  Dataset ds;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != target_idx) ds.feature_names.push_back(header[j]);
  if (ds.feature_names.empty())
    throw std::runtime_error(path + ": no feature columns besides target");

  std::unordered_map<std::string, int> class_index;
  std::size_t row_no = 0;  // 1-based data row counter
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(ds.feature_names.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == target_idx) continue;
      double v;
      if (!parse_double(cells[j], v))
        throw std::runtime_error(path + ": non-numeric cell at row " + std::to_string(row_no) +
                                 ", column '" + header[j] + "'");
      row.push_back(v);
    }
    const std::string label = trim(cells[target_idx]);
    if (label.empty())
      throw std::runtime_error(path + ": empty class label at row " + std::to_string(row_no));
    auto [it, inserted] = class_index.try_emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.push_back(label);
    ds.targets.push_back(it->second);
    ds.rows.push_back(std::move(row));
  }

  if (ds.rows.empty())
    throw std::runtime_error(path + ": no data rows (schema validated: " +
                             std::to_string(ds.feature_names.size()) + " features, target '" +
                             target_column + "')");
  ds.validate();
  return ds;
}

std::string format_csv(const Dataset& ds, const std::string& target_column) {
  std::ostringstream out;
  for (const auto& name : ds.feature_names) out << name << ',';
  out << target_column << '\n';
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    for (double v : ds.rows[i]) out << format_double(v) << ',';
    out << ds.class_names[static_cast<std::size_t>(ds.targets[i])] << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& ds, const std::string& path, const std::string& target_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << format_csv(ds, target_column);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const Dataset& ds, double test_fraction, std::uint64_t seed, bool* stratified) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must be in (0,1)");
  const std::size_t n = ds.n_samples();

  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(ds.targets[i])].push_back(i);

  bool can_stratify = true;
  for (const auto& members : by_class)
    if (members.size() == 1) can_stratify = false;
  if (stratified) *stratified = can_stratify;

  // Test part receives ceil(fraction * n) samples in total, at least 1 and
  // at most n-1 so both parts stay non-empty.
  std::size_t test_total =
      static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
  test_total = std::max<std::size_t>(1, std::min(test_total, n - 1));

  std::vector<std::size_t> test_idx;
  if (can_stratify) {
    // Per-stratum floor allocation, remaining slots by largest remainder
    // (ties broken by class index).
    std::vector<std::size_t> want(by_class.size());
    std::vector<double> remainder(by_class.size());
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double exact = test_fraction * static_cast<double>(by_class[c].size());
      want[c] = static_cast<std::size_t>(std::floor(exact));
      remainder[c] = exact - static_cast<double>(want[c]);
      assigned += want[c];
    }
    std::vector<std::size_t> order(by_class.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
      return a < b;
    });
    for (std::size_t k = 0; assigned < test_total && k < order.size(); ++k) {
      const std::size_t c = order[k];
      if (want[c] < by_class[c].size()) {
        ++want[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      auto members = by_class[c];
      Substream rng(seed, RngDomain::split_shuffle, c);
      rng.shuffle(members);
      // keep every stratum represented in the training part
      const std::size_t take = std::min(want[c], members.size() - 1);
      test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<long>(take));
    }
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    Substream rng(seed, RngDomain::split_shuffle);
    rng.shuffle(all);
    test_idx.assign(all.begin(), all.begin() + static_cast<long>(test_total));
  }

  std::sort(test_idx.begin(), test_idx.end());
  std::vector<std::size_t> train_idx;
  train_idx.reserve(n - test_idx.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t < test_idx.size() && test_idx[t] == i)
      ++t;
    else
      train_idx.push_back(i);
  }
  return {train_idx, test_idx};
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.class_names = ds.class_names;
  out.rows.reserve(indices.size());
  out.targets.reserve(indices.size());
  for (std::size_t i : indices) {
    out.rows.push_back(ds.rows[i]);
    out.targets.push_back(ds.targets[i]);
  }
  return out;
}

SplitResult split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  bool stratified = true;
  auto [train_idx, test_idx] = split_indices(ds, test_fraction, seed, &stratified);
  SplitResult result;
  result.train = take_rows(ds, train_idx);
  result.test = take_rows(ds, test_idx);
  result.stratified = stratified;
  if (!stratified)
    result.note = "a class has a single member; fell back to unstratified split";
  return result;
}

FeatureStats feature_stats(const Dataset& ds) {
  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();
  FeatureStats st;
  st.mean.assign(d, 0.0);
  st.stddev.assign(d, 0.0);
  st.min.assign(d, 0.0);
  st.max.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = ds.rows[0][j], hi = ds.rows[0][j], sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = ds.rows[i][j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dlt = ds.rows[i][j] - mean;
      ss += dlt * dlt;
    }
    st.mean[j] = mean;
    st.min[j] = lo;
    st.max[j] = hi;
    st.stddev[j] = (lo == hi) ? 0.0 : std::sqrt(ss / static_cast<double>(n));
  }
  return st;
}

std::vector<double> pearson_correlation(const Dataset& ds) {
  const std::size_t n = ds.n_samples();
  const std::size_t d = ds.n_features();
  double ty = 0.0;
  for (int t : ds.targets) ty += static_cast<double>(t);
  const double my = ty / static_cast<double>(n);
  double syy = 0.0;
  for (int t : ds.targets) {
    const double dy = static_cast<double>(t) - my;
    syy += dy * dy;
  }
  std::vector<double> out(d, 0.0);
  if (syy == 0.0) return out;  // constant target: all coefficients 0
  const FeatureStats st = feature_stats(ds);
  for (std::size_t j = 0; j < d; ++j) {
    if (st.min[j] == st.max[j]) continue;  // constant feature -> 0
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = ds.rows[i][j] - st.mean[j];
      const double dy = static_cast<double>(ds.targets[i]) - my;
      sxy += dx * dy;
      sxx += dx * dx;
    }
    out[j] = sxy / std::sqrt(sxx * syy);
  }
  return out;
}

}  // namespace interp
