#include "dqr/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dqr/distributions.hpp"
#include "dqr/functionals.hpp"
#include "dqr/kv.hpp"

namespace dqr {

namespace {

double softplus(double t) {
  if (t > 30.0) return t;
  return std::log1p(std::exp(t));
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  const std::string s = trim(cell);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw std::runtime_error("row " + std::to_string(row) + ", column '" + col +
                             "': cannot parse numeric cell '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double rescale(double v, double lo, double hi) {
  const double range = hi - lo;
  return range > 0.0 ? (v - lo) / range : 0.0;
}

Eigen::MatrixXd uniform_features(std::size_t n, int q, std::mt19937_64& rng) {
  Eigen::MatrixXd X(n, q + 1);
  X.col(0).setOnes();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int j = 1; j <= q; ++j) X(i, j) = u(rng);
  }
  return X;
}

std::vector<FeatureColumn> uniform_columns(int q) {
  std::vector<FeatureColumn> cols;
  cols.push_back({ColumnKind::Constant, "const", 0.0, 1.0, "", ""});
  for (int j = 1; j <= q; ++j) {
    cols.push_back(
        {ColumnKind::Continuous, "x" + std::to_string(j), 0.0, 1.0, "", ""});
  }
  return cols;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Dataset Dataset::rows(const std::vector<Eigen::Index>& idx) const {
  Dataset out;
  out.columns = columns;
  out.response_name = response_name;
  out.responses.resize(idx.size());
  out.features.resize(idx.size(), features.cols());
  if (truth) out.truth = Eigen::MatrixXd(idx.size(), truth->cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.responses(k) = responses(idx[k]);
    out.features.row(k) = features.row(idx[k]);
    if (truth) out.truth->row(k) = truth->row(idx[k]);
  }
  return out;
}

void Dataset::validate() const {
  if (responses.size() == 0) {
    throw domain_error("dataset is empty");
  }
  if (features.rows() != responses.size()) {
    throw domain_error("feature/response row counts differ");
  }
  if (static_cast<std::size_t>(features.cols()) != columns.size() ||
      columns.empty() || columns[0].kind != ColumnKind::Constant) {
    throw domain_error("column metadata does not match the feature matrix");
  }
  for (Eigen::Index i = 0; i < responses.size(); ++i) {
    if (!(responses(i) > 0.0)) {
      throw domain_error("row " + std::to_string(i + 1) +
                         ": response must be strictly positive");
    }
    if (features(i, 0) != 1.0) {
      throw domain_error("first feature column must be the constant 1");
    }
  }
  if (truth && truth->rows() != responses.size()) {
    throw domain_error("truth row count differs from responses");
  }
}

Dataset simulate_gamma(std::size_t n, std::uint64_t seed,
                       const Eigen::VectorXd& coeff_mu, double gamma_shape,
                       double tau) {
  if (n < 1) throw domain_error("n must be >= 1");
  if (coeff_mu.size() < 1 || !coeff_mu.allFinite()) {
    throw domain_error("coeff_mu must be nonempty and finite");
  }
  if (!(gamma_shape > 0.0)) throw domain_error("gamma_shape must be > 0");
  if (!(tau > 0.0 && tau < 1.0)) throw domain_error("tau must lie in (0,1)");

  const int q = static_cast<int>(coeff_mu.size()) - 1;
  std::mt19937_64 rng(seed);
  Dataset data;
  data.features = uniform_features(n, q, rng);
  data.columns = uniform_columns(q);
  data.responses.resize(n);
  data.truth = Eigen::MatrixXd(n, 3);
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    const double mu = std::exp(data.features.row(i).dot(coeff_mu));
    std::gamma_distribution<double> g(gamma_shape, mu / gamma_shape);
    double y = g(rng);
    while (!(y > 0.0)) y = g(rng);  // guards float underflow at tiny shapes
    data.responses(i) = y;
    const CompositeTriplet t = gamma_triplet({mu, gamma_shape}, tau);
    data.truth->row(i) << t.e_minus(), t.v(), t.e_plus();
  }
  data.validate();
  return data;
}

Dataset simulate_lognormal(std::size_t n, std::uint64_t seed,
                           const Eigen::VectorXd& coeff_m,
                           const Eigen::VectorXd& coeff_s, double tau) {
  if (n < 1) throw domain_error("n must be >= 1");
  if (coeff_m.size() != coeff_s.size() || coeff_m.size() < 1) {
    throw domain_error("coeff_m and coeff_s must have equal nonzero length");
  }
  if (!coeff_m.allFinite() || !coeff_s.allFinite()) {
    throw domain_error("coefficients must be finite");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw domain_error("tau must lie in (0,1)");

  const int q = static_cast<int>(coeff_m.size()) - 1;
  const double z_tau = normal_quantile(tau);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset data;
  data.features = uniform_features(n, q, rng);
  data.columns = uniform_columns(q);
  data.responses.resize(n);
  data.truth = Eigen::MatrixXd(n, 3);
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    const double m = data.features.row(i).dot(coeff_m);
    const double s = softplus(data.features.row(i).dot(coeff_s));
    data.responses(i) = std::exp(m + s * gauss(rng));
    const double mean = std::exp(m + 0.5 * s * s);
    const double v = std::exp(m + s * z_tau);
    const double e_minus = mean * normal_cdf(z_tau - s) / tau;
    const double e_plus = mean * normal_cdf(s - z_tau) / (1.0 - tau);
    data.truth->row(i) << e_minus, v, e_plus;
  }
  data.validate();
  return data;
}

Dataset load_csv(const std::string& csv_path, const std::string& schema_path) {
  const auto schema = parse_kv_file(schema_path);
  std::string response_col;
  std::map<std::string, std::string> feature_kinds;  // column -> kind
  for (const auto& [key, value] : schema) {
    if (key == "response") {
      response_col = value;
    } else if (key.rfind("feature.", 0) == 0) {
      const std::string col = key.substr(8);
      if (value != "continuous" && value != "binary" && value != "categorical") {
        throw std::runtime_error("schema: unknown feature kind '" + value +
                                 "' for column '" + col + "'");
      }
      feature_kinds[col] = value;
    } else {
      throw std::runtime_error("schema: unknown key '" + key + "'");
    }
  }
  if (response_col.empty()) {
    throw std::runtime_error("schema: missing 'response' entry");
  }

  std::ifstream in(csv_path);
  if (!in) {
    throw std::runtime_error("cannot open CSV file: " + csv_path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(csv_path + ": missing header row");
  }
  const auto header = split_line(line);
  std::map<std::string, std::size_t> col_index;
  for (std::size_t j = 0; j < header.size(); ++j) col_index[trim(header[j])] = j;

  if (!col_index.count(response_col)) {
    throw std::runtime_error(csv_path + ": missing response column '" +
                             response_col + "'");
  }
  std::vector<std::string> feature_order;  // header order, schema-filtered
  for (const auto& cell : header) {
    const std::string name = trim(cell);
    if (feature_kinds.count(name)) feature_order.push_back(name);
  }
  for (const auto& [col, kind] : feature_kinds) {
    (void)kind;
    if (!col_index.count(col)) {
      throw std::runtime_error(csv_path + ": missing feature column '" + col + "'");
    }
  }

  std::vector<double> responses;
  std::map<std::string, std::vector<double>> numeric;       // per numeric feature
  std::map<std::string, std::vector<std::string>> factors;  // per categorical
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " cells, found " +
                               std::to_string(cells.size()));
    }
    const double y = parse_cell(cells[col_index[response_col]], row, response_col);
    if (!(y > 0.0)) {
      throw std::runtime_error("row " + std::to_string(row) +
                               ": response must be strictly positive");
    }
    responses.push_back(y);
    for (const auto& name : feature_order) {
      const std::string& kind = feature_kinds[name];
      const std::string& cell = cells[col_index[name]];
      if (kind == "categorical") {
        factors[name].push_back(trim(cell));
      } else {
        const double v = parse_cell(cell, row, name);
        if (kind == "binary" && v != 0.0 && v != 1.0) {
          throw std::runtime_error("row " + std::to_string(row) + ", column '" +
                                   name + "': binary values must be 0 or 1");
        }
        numeric[name].push_back(v);
      }
    }
  }
  if (responses.empty()) {
    throw std::runtime_error(csv_path + ": no data rows");
  }
  const std::size_t n = responses.size();

  // Assemble the encoded matrix: constant, then features in header order,
  // categoricals expanded to one-hot blocks over sorted levels.
  std::vector<FeatureColumn> columns;
  columns.push_back({ColumnKind::Constant, "const", 0.0, 1.0, "", ""});
  std::vector<Eigen::VectorXd> encoded;
  for (const auto& name : feature_order) {
    const std::string& kind = feature_kinds[name];
    if (kind == "categorical") {
      const auto& vals = factors[name];
      std::set<std::string> levels(vals.begin(), vals.end());
      for (const auto& level : levels) {
        Eigen::VectorXd col(n);
        for (std::size_t i = 0; i < n; ++i) col(i) = (vals[i] == level) ? 1.0 : 0.0;
        encoded.push_back(std::move(col));
        columns.push_back({ColumnKind::OneHot, name + "=" + level, 0.0, 1.0, name, level});
      }
    } else if (kind == "binary") {
      const auto& vals = numeric[name];
      encoded.push_back(Eigen::Map<const Eigen::VectorXd>(vals.data(), n));
      columns.push_back({ColumnKind::Binary, name, 0.0, 1.0, "", ""});
    } else {
      const auto& vals = numeric[name];
      const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
      Eigen::VectorXd col(n);
      for (std::size_t i = 0; i < n; ++i) col(i) = rescale(vals[i], *mn, *mx);
      encoded.push_back(std::move(col));
      columns.push_back({ColumnKind::Continuous, name, *mn, *mx, "", ""});
    }
  }

  Dataset data;
  data.response_name = response_col;
  data.responses = Eigen::Map<const Eigen::VectorXd>(responses.data(), n);
  data.features.resize(n, 1 + encoded.size());
  data.features.col(0).setOnes();
  for (std::size_t j = 0; j < encoded.size(); ++j) data.features.col(j + 1) = encoded[j];
  data.columns = std::move(columns);
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  // Header: response first, then source columns (one-hot groups collapse
  // back to their categorical column).
  out << data.response_name;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> emit;  // name, col idx
  for (std::size_t j = 1; j < data.columns.size(); ++j) {
    const auto& col = data.columns[j];
    if (col.kind == ColumnKind::OneHot) {
      if (!emit.empty() && emit.back().first == col.group) {
        emit.back().second.push_back(j);
      } else {
        emit.push_back({col.group, {j}});
      }
    } else {
      emit.push_back({col.name, {j}});
    }
  }
  for (const auto& [name, idx] : emit) {
    (void)idx;
    out << ',' << name;
  }
  out << '\n';

  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << format_double(data.responses(i));
    for (const auto& [name, idx] : emit) {
      (void)name;
      const auto& first = data.columns[idx[0]];
      if (first.kind == ColumnKind::OneHot) {
        std::string level;
        for (std::size_t j : idx) {
          if (data.features(i, j) == 1.0) level = data.columns[j].level;
        }
        out << ',' << level;
      } else if (first.kind == ColumnKind::Continuous) {
        const double raw = first.min + data.features(i, idx[0]) * (first.max - first.min);
        out << ',' << format_double(raw);
      } else {
        out << ',' << format_double(data.features(i, idx[0]));
      }
    }
    out << '\n';
  }
}

void write_triplet_csv(const Eigen::MatrixXd& triplets, const std::string& path) {
  if (triplets.cols() != 3) {
    throw domain_error("triplet matrix must have 3 columns");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << "e_minus,v,e_plus\n";
  for (Eigen::Index i = 0; i < triplets.rows(); ++i) {
    out << format_double(triplets(i, 0)) << ',' << format_double(triplets(i, 1))
        << ',' << format_double(triplets(i, 2)) << '\n';
  }
}

Eigen::MatrixXd load_triplet_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in, line) || split_line(line).size() != 3) {
    throw std::runtime_error(path + ": expected header e_minus,v,e_plus");
  }
  std::vector<std::array<double, 3>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 3) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected 3 cells");
    }
    rows.push_back({parse_cell(cells[0], row, "e_minus"),
                    parse_cell(cells[1], row, "v"),
                    parse_cell(cells[2], row, "e_plus")});
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }
  Eigen::MatrixXd out(rows.size(), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(i, 0) = rows[i][0];
    out(i, 1) = rows[i][1];
    out(i, 2) = rows[i][2];
  }
  return out;
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_split_indices(const Eigen::VectorXd& responses, double fraction,
                         std::uint64_t seed) {
  const Eigen::Index n = responses.size();
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw domain_error("split fraction must lie in (0,1)");
  }
  const auto total_second =
      static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  if (total_second < 1 || n - total_second < 1) {
    throw domain_error("split would produce an empty part");
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return responses(a) < responses(b) || (responses(a) == responses(b) && a < b);
  });

  const int n_buckets = static_cast<int>(std::min<Eigen::Index>(10, n));
  std::vector<std::vector<Eigen::Index>> buckets(n_buckets);
  for (Eigen::Index r = 0; r < n; ++r) {
    buckets[static_cast<int>(r * n_buckets / n)].push_back(order[r]);
  }

  std::mt19937_64 rng(seed);
  for (auto& bucket : buckets) std::shuffle(bucket.begin(), bucket.end(), rng);

  // Largest-remainder allocation of the second-part counts across buckets;
  // ties between equal remainders are broken by the seeded rng so no decile
  // is systematically favored.
  std::vector<Eigen::Index> take(n_buckets);
  std::vector<int> tiebreak(n_buckets);
  std::iota(tiebreak.begin(), tiebreak.end(), 0);
  std::shuffle(tiebreak.begin(), tiebreak.end(), rng);
  std::vector<std::pair<double, int>> remainders;
  Eigen::Index assigned = 0;
  for (int b = 0; b < n_buckets; ++b) {
    const double target = fraction * static_cast<double>(buckets[b].size());
    take[b] = static_cast<Eigen::Index>(std::floor(target));
    take[b] = std::min<Eigen::Index>(take[b], buckets[b].size());
    assigned += take[b];
    remainders.push_back({target - std::floor(target), b});
  }
  std::sort(remainders.begin(), remainders.end(),
            [&](const auto& a, const auto& b) {
              return a.first > b.first ||
                     (a.first == b.first && tiebreak[a.second] < tiebreak[b.second]);
            });
  for (const auto& [frac, b] : remainders) {
    (void)frac;
    if (assigned >= total_second) break;
    if (take[b] < static_cast<Eigen::Index>(buckets[b].size())) {
      ++take[b];
      ++assigned;
    }
  }

  std::vector<Eigen::Index> first, second;
  first.reserve(n - total_second);
  second.reserve(total_second);
  for (int b = 0; b < n_buckets; ++b) {
    for (std::size_t k = 0; k < buckets[b].size(); ++k) {
      (k < static_cast<std::size_t>(take[b]) ? second : first).push_back(buckets[b][k]);
    }
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

std::pair<Dataset, Dataset> split_stratified(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed) {
  data.validate();
  const auto [learn_idx, test_idx] =
      stratified_split_indices(data.responses, test_fraction, seed);
  Dataset learn = data.rows(learn_idx);
  Dataset test = data.rows(test_idx);

  // Recompute continuous scaling on the learn part only, then apply to both.
  for (std::size_t j = 1; j < data.columns.size(); ++j) {
    const auto& col = data.columns[j];
    if (col.kind != ColumnKind::Continuous) continue;
    const double range = col.max - col.min;
    auto unscale = [&](double v) { return col.min + v * range; };
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (Eigen::Index i = 0; i < learn.size(); ++i) {
      const double raw = unscale(learn.features(i, j));
      mn = std::min(mn, raw);
      mx = std::max(mx, raw);
    }
    for (Dataset* part : {&learn, &test}) {
      for (Eigen::Index i = 0; i < part->size(); ++i) {
        part->features(i, j) = rescale(unscale(part->features(i, j)), mn, mx);
      }
      part->columns[j].min = mn;
      part->columns[j].max = mx;
    }
  }
  return {std::move(learn), std::move(test)};
}

Dataset align_to_columns(const Dataset& data,
                         const std::vector<FeatureColumn>& target) {
  if (data.columns.size() != target.size()) {
    throw domain_error("model expects " + std::to_string(target.size() - 1) +
                       " feature columns, dataset has " +
                       std::to_string(data.columns.size() - 1));
  }
  Dataset out = data;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (!data.columns[j].same_identity(target[j])) {
      throw domain_error("feature column " + std::to_string(j) + " ('" +
                         data.columns[j].name + "') does not match the model ('" +
                         target[j].name + "')");
    }
    if (target[j].kind == ColumnKind::Continuous) {
      const auto& own = data.columns[j];
      const double range = own.max - own.min;
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double raw = own.min + data.features(i, j) * range;
        out.features(i, j) = rescale(raw, target[j].min, target[j].max);
      }
    }
    out.columns[j] = target[j];
  }
  return out;
}

}  // namespace dqr
