#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dqr/functionals.hpp"
#include "dqr/train.hpp"
#include "support/oracles.hpp"

using namespace dqr;

namespace {

// n copies of {1..10} as an intercept-only dataset (constant column only).
Dataset repeated_one_to_ten(int copies) {
  const int n = 10 * copies;
  Dataset data;
  data.features = Eigen::MatrixXd::Ones(n, 1);
  data.columns = {{ColumnKind::Constant, "const", 0.0, 1.0, "", ""}};
  data.responses.resize(n);
  for (int i = 0; i < n; ++i) data.responses(i) = static_cast<double>(i % 10 + 1);
  return data;
}

NetworkConfig intercept_cfg(HeadKind head, std::vector<double> levels) {
  NetworkConfig cfg;
  cfg.input_dim = 0;
  cfg.hidden_dims = {4, 3};
  cfg.head = head;
  cfg.levels = std::move(levels);
  return cfg;
}

TrainConfig quick_train(int epochs, int starts = 1) {
  TrainConfig tc;
  tc.batch_size = 32;
  tc.max_epochs = epochs;
  tc.patience = epochs;  // run the full budget
  tc.learning_rate = 0.01;
  tc.n_starts = starts;
  tc.val_fraction = 0.2;
  tc.seed = 42;
  tc.freeze_hidden = true;
  return tc;
}

}  // namespace

TEST_CASE("split_learn sizes, determinism and stratification") {
  Eigen::VectorXd coeff(2);
  coeff << 0.0, 1.0;
  const Dataset data = simulate_gamma(100, 3, coeff, 2.0, 0.9);

  const auto [train, val] = split_learn(data, 0.2, 9);
  CHECK(train.size() == 80);
  CHECK(val.size() == 20);

  const auto [train2, val2] = split_learn(data, 0.2, 9);
  for (Eigen::Index i = 0; i < val.size(); ++i) {
    CHECK(val2.responses(i) == val.responses(i));
  }

  // Decile counts proportional within +-1: each response decile of the full
  // data holds 10 rows, so the validation part gets 2 +- 1 per decile.
  std::vector<double> sorted(data.responses.data(),
                             data.responses.data() + data.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> counts(10, 0);
  for (Eigen::Index i = 0; i < val.size(); ++i) {
    const auto pos = std::upper_bound(sorted.begin(), sorted.end(),
                                      val.responses(i)) - sorted.begin();
    ++counts[std::min<std::ptrdiff_t>(9, (pos - 1) * 10 / sorted.size())];
  }
  for (int d = 0; d < 10; ++d) {
    CHECK(counts[d] >= 1);
    CHECK(counts[d] <= 3);
  }

  Dataset nine;
  nine.features = Eigen::MatrixXd::Ones(9, 1);
  nine.columns = {{ColumnKind::Constant, "const", 0.0, 1.0, "", ""}};
  nine.responses = Eigen::VectorXd::LinSpaced(9, 1.0, 9.0);
  CHECK_THROWS_AS(split_learn(nine, 0.2, 1), domain_error);
}

TEST_CASE("auto_eta equalizes intercept-only pinball losses") {
  const Dataset data = repeated_one_to_ten(1);
  const std::vector<double> levels = {0.1, 0.9};
  const auto eta = auto_eta(data, levels);
  REQUIRE(eta.size() == 2);

  // Grid-search oracle for the minimal mean pinball loss per level.
  std::vector<double> sample(data.responses.data(),
                             data.responses.data() + data.size());
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const auto candidates = oracle::grid_with_kinks(1.0, 10.0, 0.001, sample);
    double best = std::numeric_limits<double>::infinity();
    for (double a : candidates) {
      double s = 0.0;
      for (double y : sample) s += pinball_loss(y, a, levels[j]);
      best = std::min(best, s / sample.size());
    }
    CHECK(eta[j] == doctest::Approx(1.0 / best).epsilon(1e-9));
    CHECK(eta[j] * best == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Positive homogeneity: scaling responses by 10 divides eta by 10.
  Dataset scaled = data;
  scaled.responses *= 10.0;
  const auto eta10 = auto_eta(scaled, levels);
  CHECK(eta10[0] == doctest::Approx(eta[0] / 10.0).epsilon(1e-12));
  CHECK(eta10[1] == doctest::Approx(eta[1] / 10.0).epsilon(1e-12));

  // Constant sample: zero loss falls back to weight 1.
  Dataset constant = data;
  constant.responses.setConstant(4.2);
  const auto eta_const = auto_eta(constant, levels);
  CHECK(eta_const[0] == 1.0);
  CHECK(eta_const[1] == 1.0);
}

TEST_CASE("intercept-only pinball fit converges to the empirical quantile") {
  const Dataset data = repeated_one_to_ten(10);
  const auto cfg = intercept_cfg(HeadKind::MultiQuantileAdditive, {0.5});
  const FitReport report = fit(data, data, cfg, quick_train(300),
                               Objective::multi_quantile({0.5}, {1.0}));
  const double fitted = report.eval_predictions(0, 0);
  CHECK(fitted >= 5.0 - 0.05);
  CHECK(fitted <= 6.0 + 0.05);
}

TEST_CASE("intercept-only composite fit recovers the empirical triplet") {
  const Dataset data = repeated_one_to_ten(10);
  const auto cfg = intercept_cfg(HeadKind::CompositeAdditive, {0.5});
  const auto spec = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.5);
  const FitReport report =
      fit(data, data, cfg, quick_train(400), Objective::composite(spec));
  CHECK(std::fabs(report.eval_predictions(0, 0) - 3.0) <= 0.1);
  CHECK(report.eval_predictions(0, 1) >= 5.0 - 0.1);
  CHECK(report.eval_predictions(0, 1) <= 6.0 + 0.1);
  CHECK(std::fabs(report.eval_predictions(0, 2) - 8.0) <= 0.1);
}

TEST_CASE("early stopping bookkeeping and trace invariants") {
  Eigen::VectorXd coeff(3);
  coeff << 0.3, 0.8, -0.5;
  const Dataset data = simulate_gamma(2000, 7, coeff, 2.0, 0.9);

  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {8, 6};
  cfg.head = HeadKind::CompositeAdditive;
  cfg.levels = {0.9};
  TrainConfig tc;
  tc.batch_size = 128;
  tc.max_epochs = 60;
  tc.patience = 8;
  tc.learning_rate = 5e-3;
  tc.n_starts = 2;
  tc.seed = 11;
  const auto spec = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.9);
  const FitReport report = fit(data, std::nullopt, cfg, tc, Objective::composite(spec));

  const auto [train, val] = split_learn(data, tc.val_fraction, tc.seed);
  for (const auto& start : report.starts) {
    REQUIRE(!start.failed);
    REQUIRE(!start.trace.empty());
    double min_val = std::numeric_limits<double>::infinity();
    for (const auto& e : start.trace) min_val = std::min(min_val, e.val_loss);
    CHECK(start.best_val_loss == min_val);
    // Reported parameters reproduce the recorded minimum validation loss.
    const double recomputed = batch_loss(val.features, val.responses,
                                         start.best_params, cfg,
                                         Objective::composite(spec));
    CHECK(recomputed == doctest::Approx(start.best_val_loss).epsilon(1e-12));
    CHECK(start.trace[start.best_epoch - 1].val_loss == start.best_val_loss);
  }
}

TEST_CASE("training loss decreases in the smoothed sense") {
  const Dataset data = repeated_one_to_ten(10);
  const auto cfg = intercept_cfg(HeadKind::MultiQuantileAdditive, {0.5});
  const FitReport report = fit(data, std::nullopt, cfg, quick_train(120),
                               Objective::multi_quantile({0.5}, {1.0}));
  const auto& trace = report.starts[0].trace;
  REQUIRE(trace.size() >= 20);
  auto window_mean = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < from + 10; ++i) s += trace[i].train_loss;
    return s / 10.0;
  };
  CHECK(window_mean(trace.size() - 10) < window_mean(0));
}

TEST_CASE("fit is reproducible and predictions never cross") {
  Eigen::VectorXd coeff(3);
  coeff << 0.2, 0.6, -0.4;
  const Dataset data = simulate_gamma(1500, 13, coeff, 2.0, 0.9);
  const auto [learn, test] = split_stratified(data, 0.2, 13);

  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {6, 4};
  cfg.head = HeadKind::MultiQuantileMultiplicative;
  cfg.levels = {0.1, 0.5, 0.9};
  TrainConfig tc;
  tc.batch_size = 128;
  tc.max_epochs = 25;
  tc.patience = 25;
  tc.n_starts = 2;
  tc.seed = 3;

  const auto obj = Objective::multi_quantile(cfg.levels, {});
  const FitReport a = fit(learn, test, cfg, tc, obj);
  const FitReport b = fit(learn, test, cfg, tc, obj);

  REQUIRE(a.starts.size() == b.starts.size());
  for (std::size_t s = 0; s < a.starts.size(); ++s) {
    const auto& pa = a.starts[s].best_params.flat();
    const auto& pb = b.starts[s].best_params.flat();
    REQUIRE(pa.size() == pb.size());
    for (Eigen::Index i = 0; i < pa.size(); ++i) CHECK(pa(i) == pb(i));
  }
  for (Eigen::Index i = 0; i < a.eval_predictions.rows(); ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(a.eval_predictions(i, j) == b.eval_predictions(i, j));
    }
    CHECK(a.eval_predictions(i, 0) < a.eval_predictions(i, 1));
    CHECK(a.eval_predictions(i, 1) < a.eval_predictions(i, 2));
    CHECK(a.eval_predictions(i, 0) > 0.0);
  }
  CHECK(a.eta == b.eta);
  REQUIRE(a.eta.size() == 3);
}

TEST_CASE("composite fits keep the triplet ordering on all predictions") {
  Eigen::VectorXd coeff(2);
  coeff << 0.5, 0.7;
  const Dataset data = simulate_gamma(1200, 17, coeff, 1.5, 0.8);
  const auto [learn, test] = split_stratified(data, 0.25, 17);

  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.hidden_dims = {6, 4};
  cfg.head = HeadKind::CompositeAdditive;
  cfg.levels = {0.8};
  TrainConfig tc;
  tc.batch_size = 64;
  tc.max_epochs = 30;
  tc.patience = 30;
  tc.n_starts = 3;
  tc.seed = 5;
  const auto spec = ScoreSpec::revelation_plus({0.0, 2.0}, {0.0, 2.0}, 1.0, 0.8);
  const FitReport report = fit(learn, test, cfg, tc, Objective::composite(spec));
  REQUIRE(report.calibration.has_value());
  CHECK(report.calibration->n == static_cast<std::size_t>(test.size()));
  for (Eigen::Index i = 0; i < report.eval_predictions.rows(); ++i) {
    CHECK(report.eval_predictions(i, 0) > 0.0);
    CHECK(report.eval_predictions(i, 0) < report.eval_predictions(i, 1));
    CHECK(report.eval_predictions(i, 1) < report.eval_predictions(i, 2));
  }
}

TEST_CASE("config validation") {
  TrainConfig tc;
  tc.batch_size = 0;
  CHECK_THROWS_AS(tc.validate(), domain_error);
  tc = TrainConfig{};
  tc.val_fraction = 1.0;
  CHECK_THROWS_AS(tc.validate(), domain_error);
  tc = TrainConfig{};
  tc.moment_decays = {1.0, 0.999};
  CHECK_THROWS_AS(tc.validate(), domain_error);
}
