#include "dqr/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "dqr/functionals.hpp"

namespace dqr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Mean objective of fixed head outputs (no network involved); used to score
// averaged predictions.
double objective_loss_on_predictions(const Objective& obj,
                                     const Eigen::MatrixXd& preds,
                                     const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    switch (obj.kind) {
      case Objective::Kind::MultiQuantile:
        for (std::size_t j = 0; j < obj.levels.size(); ++j) {
          total += obj.eta[j] * pinball_loss(y(i), preds(i, j), obj.levels[j]);
        }
        break;
      case Objective::Kind::Composite:
        total += composite_score(
            y(i), CompositeTriplet(preds(i, 0), preds(i, 1), preds(i, 2)),
            *obj.spec);
        break;
      case Objective::Kind::BregmanMean:
        total += 0.5 * obj.bregman_c * bregman_loss(y(i), preds(i, 0), obj.bregman_b);
        break;
    }
  }
  return total / static_cast<double>(y.size());
}

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
};

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
               AdamState& state, const TrainConfig& cfg) {
  const double b1 = cfg.moment_decays.first;
  const double b2 = cfg.moment_decays.second;
  const double eps = 1e-8;
  ++state.t;
  state.m = b1 * state.m + (1.0 - b1) * grad;
  state.v = b2 * state.v + (1.0 - b2) * grad.cwiseProduct(grad);
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  const Eigen::VectorXd m_hat = state.m / corr1;
  const Eigen::VectorXd v_hat = state.v / corr2;
  Eigen::VectorXd update;
  if (cfg.nesterov) {
    update = b1 * m_hat + ((1.0 - b1) / corr1) * grad;
  } else {
    update = m_hat;
  }
  theta.array() -= cfg.learning_rate * update.array() / (v_hat.array().sqrt() + eps);
}

StartResult run_start(const Dataset& train, const Dataset& val,
                      const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                      const Objective& objective, std::uint64_t start_seed) {
  StartResult result;
  result.seed = start_seed;

  NetworkParams params = NetworkParams::glorot(net_cfg, start_seed);
  if (train_cfg.freeze_hidden) {
    params.flat().head(params.head_offset()).setZero();
  }
  AdamState adam{Eigen::VectorXd::Zero(params.flat().size()),
                 Eigen::VectorXd::Zero(params.flat().size()), 0};

  std::mt19937_64 shuffle_rng(splitmix64(start_seed + 1));
  std::vector<Eigen::Index> order(train.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  NetworkParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int stale = 0;

  const Eigen::Index n = train.size();
  const Eigen::Index bs = std::min<Eigen::Index>(train_cfg.batch_size, n);
  Eigen::MatrixXd xb(bs, train.features.cols());
  Eigen::VectorXd yb(bs);

  for (int epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (Eigen::Index pos = 0; pos < n; pos += bs) {
      const Eigen::Index count = std::min(bs, n - pos);
      for (Eigen::Index k = 0; k < count; ++k) {
        xb.row(k) = train.features.row(order[pos + k]);
        yb(k) = train.responses(order[pos + k]);
      }
      BatchGradient bg = gradient(xb.topRows(count), yb.head(count), params,
                                  net_cfg, objective);
      if (!std::isfinite(bg.loss) || !bg.grad.allFinite()) {
        result.failed = true;
        result.diagnostic = "non-finite loss or gradient at epoch " +
                            std::to_string(epoch);
        return result;
      }
      if (train_cfg.freeze_hidden) {
        bg.grad.head(params.head_offset()).setZero();
      }
      adam_step(params.flat(), bg.grad, adam, train_cfg);
    }

    const double train_loss =
        batch_loss(train.features, train.responses, params, net_cfg, objective);
    const double val_loss =
        batch_loss(val.features, val.responses, params, net_cfg, objective);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      result.failed = true;
      result.diagnostic = "non-finite epoch loss at epoch " + std::to_string(epoch);
      return result;
    }
    result.trace.push_back({epoch, train_loss, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best = params;
      best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
      if (stale >= train_cfg.patience) break;
    }
  }

  result.best_params = std::move(best);
  result.best_val_loss = best_val;
  result.best_epoch = best_epoch;
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1 || max_epochs < 1 || patience < 1 || n_starts < 1) {
    throw domain_error("train counts must be >= 1");
  }
  if (!(learning_rate > 0.0)) {
    throw domain_error("learning_rate must be > 0");
  }
  if (!(moment_decays.first > 0.0 && moment_decays.first < 1.0 &&
        moment_decays.second > 0.0 && moment_decays.second < 1.0)) {
    throw domain_error("moment decays must lie in (0,1)");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw domain_error("val_fraction must lie in (0,1)");
  }
  for (double e : eta_weights) {
    if (!(e > 0.0)) throw domain_error("eta weights must be > 0");
  }
}

std::pair<Dataset, Dataset> split_learn(const Dataset& data, double val_fraction,
                                        std::uint64_t seed) {
  if (data.size() < 10) {
    throw domain_error("need at least 10 rows to split off validation data");
  }
  const auto [train_idx, val_idx] =
      stratified_split_indices(data.responses, val_fraction, seed);
  return {data.rows(train_idx), data.rows(val_idx)};
}

std::vector<double> auto_eta(const Dataset& data, const std::vector<double>& levels) {
  std::vector<double> sample(data.responses.data(),
                             data.responses.data() + data.responses.size());
  std::vector<double> eta;
  eta.reserve(levels.size());
  for (double tau : levels) {
    const QuantileSet qs = empirical_quantile_set(sample, tau);
    double loss = 0.0;
    for (double y : sample) loss += pinball_loss(y, qs.lower, tau);
    loss /= static_cast<double>(sample.size());
    eta.push_back(loss > 0.0 ? 1.0 / loss : 1.0);
  }
  return eta;
}

Eigen::MatrixXd average_predictions(const std::vector<NetworkParams>& starts,
                                    const Eigen::MatrixXd& X,
                                    const NetworkConfig& cfg) {
  if (starts.empty()) {
    throw domain_error("no parameter sets to average");
  }
  Eigen::MatrixXd acc = predict(X, starts[0], cfg);
  for (std::size_t s = 1; s < starts.size(); ++s) {
    acc += predict(X, starts[s], cfg);
  }
  return acc / static_cast<double>(starts.size());
}

FitReport fit(const Dataset& learn, const std::optional<Dataset>& eval,
              const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
              Objective objective) {
  learn.validate();
  net_cfg.validate();
  train_cfg.validate();
  if (net_cfg.input_dim != learn.n_features()) {
    throw domain_error("network input_dim does not match dataset features");
  }

  auto [train, val] = split_learn(learn, train_cfg.val_fraction, train_cfg.seed);

  if (objective.kind == Objective::Kind::MultiQuantile && objective.eta.empty()) {
    objective.eta = train_cfg.eta_weights.empty() ? auto_eta(train, objective.levels)
                                                  : train_cfg.eta_weights;
  }
  objective.validate_against(net_cfg);

  FitReport report;
  report.eta = objective.eta;
  report.starts.resize(train_cfg.n_starts);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int want = train_cfg.threads > 0 ? train_cfg.threads
                                         : std::min<int>(train_cfg.n_starts, hw);
  const int n_threads = std::max(1, std::min<int>(want, train_cfg.n_starts));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int s = next.fetch_add(1); s < train_cfg.n_starts; s = next.fetch_add(1)) {
      const std::uint64_t start_seed =
          splitmix64(train_cfg.seed ^ (0x9e3779b97f4a7c15ull * (s + 1)));
      report.starts[s] =
          run_start(train, val, net_cfg, train_cfg, objective, start_seed);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<NetworkParams> survivors;
  for (const auto& s : report.starts) {
    if (!s.failed) survivors.push_back(s.best_params);
  }
  if (survivors.empty()) {
    std::string detail;
    for (const auto& s : report.starts) {
      if (!s.diagnostic.empty()) detail += " [" + s.diagnostic + "]";
    }
    throw std::runtime_error("all training starts failed:" + detail);
  }

  const Dataset& eval_set = eval ? *eval : val;
  report.eval_predictions = average_predictions(survivors, eval_set.features, net_cfg);
  report.eval_objective =
      objective_loss_on_predictions(objective, report.eval_predictions,
                                    eval_set.responses);

  if (net_cfg.head == HeadKind::CompositeAdditive) {
    std::vector<CompositeTriplet> triplets;
    triplets.reserve(eval_set.size());
    for (Eigen::Index i = 0; i < eval_set.size(); ++i) {
      triplets.emplace_back(report.eval_predictions(i, 0),
                            report.eval_predictions(i, 1),
                            report.eval_predictions(i, 2));
    }
    std::vector<double> obs(eval_set.responses.data(),
                            eval_set.responses.data() + eval_set.size());
    report.calibration =
        calibration_report(triplets, obs, objective.spec->tau());
  }
  return report;
}

}  // namespace dqr
