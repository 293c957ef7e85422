#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "dqr/model.hpp"
#include "dqr/network.hpp"
#include "support/oracles.hpp"

using namespace dqr;

namespace {

NetworkConfig small_cfg(HeadKind head, std::vector<double> levels) {
  NetworkConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden_dims = {5, 4};
  cfg.head = head;
  cfg.levels = std::move(levels);
  return cfg;
}

Eigen::VectorXd unit_rep(int dim) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
  z(0) = 1.0;
  return z;
}

Eigen::VectorXd bias_beta(int dim, double bias) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
  beta(0) = bias;
  return beta;
}

NetworkParams random_params(const NetworkConfig& cfg, std::mt19937_64& rng,
                            double scale = 1.0) {
  NetworkParams params = NetworkParams::zeros(cfg);
  std::normal_distribution<double> gauss(0.0, scale);
  for (Eigen::Index i = 0; i < params.flat().size(); ++i) {
    params.flat()(i) = gauss(rng);
  }
  return params;
}

Eigen::VectorXd random_input(const NetworkConfig& cfg, std::mt19937_64& rng) {
  Eigen::VectorXd x(cfg.input_dim + 1);
  x(0) = 1.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int j = 1; j <= cfg.input_dim; ++j) x(j) = u(rng);
  return x;
}

}  // namespace

TEST_CASE("zero weights give the constant representation") {
  const auto cfg = small_cfg(HeadKind::MultiQuantileAdditive, {0.1, 0.5, 0.9});
  const NetworkParams params = NetworkParams::zeros(cfg);
  Eigen::VectorXd x(4);
  x << 1.0, 0.3, -0.7, 2.0;
  const Eigen::VectorXd z = forward_representation(x, params, cfg);
  CHECK(z.size() == 5);
  CHECK(z(0) == 1.0);
  for (int j = 1; j < z.size(); ++j) CHECK(z(j) == 0.0);
}

TEST_CASE("forward pass is deterministic") {
  const auto cfg = small_cfg(HeadKind::MultiQuantileAdditive, {0.5});
  std::mt19937_64 rng(3);
  const NetworkParams params = random_params(cfg, rng);
  const Eigen::VectorXd x = random_input(cfg, rng);
  const Eigen::VectorXd z1 = forward_representation(x, params, cfg);
  const Eigen::VectorXd z2 = forward_representation(x, params, cfg);
  for (int j = 0; j < z1.size(); ++j) CHECK(z1(j) == z2(j));

  Eigen::VectorXd bad(3);
  bad << 1.0, 0.5, 0.5;
  CHECK_THROWS_AS(forward_representation(bad, params, cfg), domain_error);
}

TEST_CASE("single-layer representation partials match the tanh chain rule") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {3};
  cfg.head = HeadKind::MultiQuantileAdditive;
  cfg.levels = {0.5};
  std::mt19937_64 rng(5);
  NetworkParams params = random_params(cfg, rng);
  Eigen::VectorXd x(3);
  x << 1.0, 0.4, -0.8;

  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const double s = params.layer(0).row(j).dot(x);
      const double analytic = (1.0 - std::tanh(s) * std::tanh(s)) * x(k);
      NetworkParams bumped = params;
      const double h = 1e-6;
      bumped.layer(0)(j, k) += h;
      const double up = forward_representation(x, bumped, cfg)(j + 1);
      bumped.layer(0)(j, k) -= 2 * h;
      const double down = forward_representation(x, bumped, cfg)(j + 1);
      CHECK(oracle::close_rel((up - down) / (2 * h), analytic, 1e-4));
    }
  }
}

TEST_CASE("additive quantile head examples") {
  const std::vector<double> levels3 = {0.1, 0.5, 0.9};
  const auto z = unit_rep(5);
  {
    std::vector<Eigen::VectorXd> betas(3, Eigen::VectorXd::Zero(5));
    const auto q = head_multi_quantile_additive(z, betas, levels3);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(q[2] == doctest::Approx(3.0).epsilon(1e-14));
  }
  {
    std::vector<Eigen::VectorXd> betas = {bias_beta(5, std::log(5.0)),
                                          bias_beta(5, std::log(2.0))};
    const auto q = head_multi_quantile_additive(z, betas, {0.5, 0.9});
    CHECK(q[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(7.0).epsilon(1e-12));
  }
  std::vector<Eigen::VectorXd> wrong = {Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(head_multi_quantile_additive(z, wrong, {0.5}), domain_error);
  CHECK_THROWS_AS(head_multi_quantile_additive(z, {}, {}), domain_error);
}

TEST_CASE("multiplicative quantile head examples") {
  const auto z = unit_rep(5);
  {
    std::vector<Eigen::VectorXd> betas(2, Eigen::VectorXd::Zero(5));
    const auto q = head_multi_quantile_multiplicative(z, betas, {0.5, 0.9});
    CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    // Saturating the sigmoid drives the lower quantile to the top one.
    std::vector<Eigen::VectorXd> betas = {bias_beta(5, 25.0),
                                          bias_beta(5, std::log(4.0))};
    const auto q = head_multi_quantile_multiplicative(z, betas, {0.5, 0.9});
    CHECK(q[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(q[0] < q[1]);
    CHECK(q[0] == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("composite head examples") {
  const auto z = unit_rep(5);
  {
    const auto t = head_composite(z, Eigen::VectorXd::Zero(5),
                                  Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5));
    CHECK(t.e_minus() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.v() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(t.e_plus() == doctest::Approx(3.0).epsilon(1e-14));
  }
  {
    const auto t = head_composite(z, bias_beta(5, std::log(3.0)),
                                  bias_beta(5, std::log(2.5)),
                                  bias_beta(5, std::log(2.5)));
    CHECK(t.e_minus() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(t.v() == doctest::Approx(5.5).epsilon(1e-12));
    CHECK(t.e_plus() == doctest::Approx(8.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(head_composite(z, Eigen::VectorXd::Zero(4),
                                 Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)),
                  domain_error);
}

TEST_CASE("parameter count matches the layer/head display") {
  NetworkConfig cfg;
  cfg.input_dim = 10;
  cfg.hidden_dims = {20, 15, 10};
  cfg.head = HeadKind::MultiQuantileAdditive;
  cfg.levels = {0.1, 0.5, 0.9};
  // 20*11 + 15*21 + 10*16 + 3*11
  CHECK(cfg.parameter_count() == 220 + 315 + 160 + 33);
  CHECK(NetworkParams::glorot(cfg, 1).flat().size() == 728);

  cfg.head = HeadKind::CompositeAdditive;
  cfg.levels = {0.9};
  CHECK(cfg.parameter_count() == 695 + 33);

  cfg.head = HeadKind::MultiQuantileMultiplicative;
  cfg.levels = {0.1, 0.9};
  CHECK(cfg.parameter_count() == 695 + 22);
}

TEST_CASE("head outputs are strictly ordered and positive for random draws") {
  std::mt19937_64 rng(7);
  const std::vector<double> levels = {0.1, 0.5, 0.9};
  for (HeadKind head : {HeadKind::MultiQuantileAdditive,
                        HeadKind::MultiQuantileMultiplicative,
                        HeadKind::CompositeAdditive}) {
    auto cfg = small_cfg(head, head == HeadKind::CompositeAdditive
                                   ? std::vector<double>{0.9}
                                   : levels);
    int violations = 0;
    for (int draw = 0; draw < 10000; ++draw) {
      const NetworkParams params = random_params(cfg, rng);
      const Eigen::VectorXd x = random_input(cfg, rng);
      Eigen::MatrixXd out = predict(x.transpose(), params, cfg);
      for (int j = 0; j < out.cols(); ++j) {
        if (!(out(0, j) > 0.0)) ++violations;
        if (j > 0 && !(out(0, j) > out(0, j - 1))) ++violations;
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("objective head pairing is validated") {
  const auto quantile_cfg = small_cfg(HeadKind::MultiQuantileAdditive, {0.1, 0.9});
  const auto composite_cfg = small_cfg(HeadKind::CompositeAdditive, {0.9});
  const auto spec = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.9);

  CHECK_THROWS_AS(Objective::composite(spec).validate_against(quantile_cfg),
                  domain_error);
  CHECK_THROWS_AS(
      Objective::multi_quantile({0.1, 0.9}, {1.0, 1.0}).validate_against(composite_cfg),
      domain_error);
  CHECK_THROWS_AS(Objective::bregman_mean(0.0).validate_against(quantile_cfg),
                  domain_error);
  CHECK_NOTHROW(Objective::composite(spec).validate_against(composite_cfg));
  const auto wrong_tau = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.5);
  CHECK_THROWS_AS(Objective::composite(wrong_tau).validate_against(composite_cfg),
                  domain_error);
}

TEST_CASE("batch gradients match finite differences for every head") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uy(0.5, 6.0);

  auto run_check = [&](const NetworkConfig& cfg, const Objective& obj) {
    for (int rep = 0; rep < 10; ++rep) {
      const NetworkParams params = random_params(cfg, rng, 0.6);
      const Eigen::Index n = 7;
      Eigen::MatrixXd X(n, cfg.input_dim + 1);
      Eigen::VectorXd y(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = random_input(cfg, rng).transpose();
        y(i) = uy(rng);
      }
      // Keep clear of pinball/score kinks: resample responses that sit next
      // to a predicted quantile.
      const Eigen::MatrixXd preds = predict(X, params, cfg);
      bool near_kink = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < preds.cols(); ++j) {
          if (std::fabs(y(i) - preds(i, j)) < 1e-3) near_kink = true;
        }
      }
      if (near_kink) continue;

      const BatchGradient bg = gradient(X, y, params, cfg, obj);
      auto loss_at = [&](const Eigen::VectorXd& theta) {
        return batch_loss(X, y, NetworkParams::from_flat(cfg, theta), cfg, obj);
      };
      for (Eigen::Index i = 0; i < bg.grad.size(); ++i) {
        const double fd = oracle::central_difference(loss_at, params.flat(), i);
        CHECK(oracle::close_rel(bg.grad(i), fd, 1e-4));
      }
    }
  };

  run_check(small_cfg(HeadKind::MultiQuantileAdditive, {0.1, 0.5, 0.9}),
            Objective::multi_quantile({0.1, 0.5, 0.9}, {1.0, 0.7, 1.3}));
  run_check(small_cfg(HeadKind::MultiQuantileMultiplicative, {0.25, 0.75}),
            Objective::multi_quantile({0.25, 0.75}, {1.0, 1.0}));
  run_check(small_cfg(HeadKind::CompositeAdditive, {0.9}),
            Objective::composite(ScoreSpec::revelation_plus({0.338, 2.0}, {0.4, 1.5},
                                                            1.0, 0.9)));
  run_check(small_cfg(HeadKind::MultiQuantileAdditive, {0.5}),
            Objective::bregman_mean(0.0));
}

TEST_CASE("gradient vanishes at the intercept-only stationary point") {
  const Eigen::Index n = 10;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<double>(i + 1);

  {
    NetworkConfig cfg;
    cfg.input_dim = 0;
    cfg.hidden_dims = {3, 2};
    cfg.head = HeadKind::MultiQuantileAdditive;
    cfg.levels = {0.5};
    NetworkParams params = NetworkParams::zeros(cfg);
    params.head(0)(0) = std::log(5.5);  // inside the empirical quantile set
    const BatchGradient bg =
        gradient(X, y, params, cfg, Objective::multi_quantile({0.5}, {1.0}));
    CHECK(bg.grad.cwiseAbs().maxCoeff() < 1e-6);
  }
  {
    NetworkConfig cfg;
    cfg.input_dim = 0;
    cfg.hidden_dims = {3, 2};
    cfg.head = HeadKind::CompositeAdditive;
    cfg.levels = {0.5};
    NetworkParams params = NetworkParams::zeros(cfg);
    params.head(0)(0) = std::log(3.0);  // e- = 3
    params.head(1)(0) = std::log(2.5);  // v = 5.5
    params.head(2)(0) = std::log(2.5);  // e+ = 8
    const auto spec = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.5);
    const BatchGradient bg = gradient(X, y, params, cfg, Objective::composite(spec));
    CHECK(bg.grad.cwiseAbs().maxCoeff() < 1e-6);
    // Objective at the empirical functional is the attainable minimum.
    const double at_min = batch_loss(X, y, params, cfg, Objective::composite(spec));
    params.head(0)(0) = std::log(2.0);
    const double off_min = batch_loss(X, y, params, cfg, Objective::composite(spec));
    CHECK(at_min < off_min);
  }
}

TEST_CASE("near-diagonal composite batch has near-zero objective") {
  NetworkConfig cfg;
  cfg.input_dim = 0;
  cfg.hidden_dims = {2};
  cfg.head = HeadKind::CompositeAdditive;
  cfg.levels = {0.5};
  NetworkParams params = NetworkParams::zeros(cfg);
  const double y = 4.0;
  params.head(0)(0) = std::log(y);
  params.head(1)(0) = std::log(1e-8);
  params.head(2)(0) = std::log(1e-8);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(1, 1);
  Eigen::VectorXd yy(1);
  yy << y;
  const auto spec = ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.5);
  CHECK(batch_loss(X, yy, params, cfg, Objective::composite(spec)) < 1e-6);
}

TEST_CASE("model serialization round-trips bit exactly") {
  auto cfg = small_cfg(HeadKind::CompositeAdditive, {0.9});
  std::mt19937_64 rng(13);

  FittedModel model;
  model.config = cfg;
  model.objective =
      Objective::composite(ScoreSpec::additive({2.0, 2.0}, {0.0, 2.0}, 1.0, 0.9));
  model.columns = {{ColumnKind::Constant, "const", 0.0, 1.0, "", ""},
                   {ColumnKind::Continuous, "age", 17.5, 63.25, "", ""},
                   {ColumnKind::Binary, "leisure", 0.0, 1.0, "", ""},
                   {ColumnKind::OneHot, "sector=a", 0.0, 1.0, "sector", "a"}};
  model.starts.push_back(random_params(cfg, rng));
  model.starts.push_back(random_params(cfg, rng));

  const auto path = (std::filesystem::temp_directory_path() /
                     "dqr_model_roundtrip.json").string();
  model.save(path);
  const FittedModel loaded = FittedModel::load(path);
  std::filesystem::remove(path);

  REQUIRE(loaded.starts.size() == model.starts.size());
  for (std::size_t s = 0; s < model.starts.size(); ++s) {
    const auto& a = model.starts[s].flat();
    const auto& b = loaded.starts[s].flat();
    REQUIRE(a.size() == b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      CHECK(a(i) == b(i));  // bit exact
    }
  }
  CHECK(loaded.config.head == model.config.head);
  CHECK(loaded.columns.size() == model.columns.size());
  CHECK(loaded.columns[1].min == 17.5);
  CHECK(loaded.columns[3].level == "a");
}
