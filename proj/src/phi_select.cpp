#include "dqr/phi_select.hpp"

#include <cmath>
#include <string>

namespace dqr {

namespace {

constexpr double kResidualFloor = 1e-12;

// Refit a conditional mean on a row subset and return its predictions there.
std::vector<double> refit_mean_predictions(const Dataset& data,
                                           const std::vector<Eigen::Index>& idx,
                                           const NetworkConfig& refit_net,
                                           const TrainConfig& refit_train) {
  const Dataset subset = data.rows(idx);
  NetworkConfig cfg = refit_net;
  cfg.input_dim = subset.n_features();
  cfg.head = HeadKind::MultiQuantileAdditive;
  cfg.levels = {0.5};  // single output; the level itself is unused
  // Gamma deviance (b = 0), the usual first choice for claim size means.
  FitReport fit_report = fit(subset, std::nullopt, cfg, refit_train,
                             Objective::bregman_mean(0.0));
  std::vector<NetworkParams> survivors;
  for (const auto& s : fit_report.starts) {
    if (!s.failed) survivors.push_back(s.best_params);
  }
  const Eigen::MatrixXd preds =
      average_predictions(survivors, subset.features, cfg);
  return std::vector<double>(preds.col(0).data(), preds.col(0).data() + preds.rows());
}

}  // namespace

PhiRegression residual_loglog_regression(const std::vector<double>& mu_hat,
                                         const std::vector<double>& y) {
  if (mu_hat.size() != y.size()) {
    throw domain_error("mu_hat and y must have equal length");
  }
  if (mu_hat.size() < 3) {
    throw domain_error("need at least 3 points for the residual regression");
  }
  const std::size_t n = mu_hat.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu_hat[i] > 0.0)) {
      throw domain_error("fitted means must be strictly positive");
    }
    const double r2 = std::max((y[i] - mu_hat[i]) * (y[i] - mu_hat[i]),
                               kResidualFloor);
    lx[i] = std::log(mu_hat[i]);
    ly[i] = std::log(r2);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw domain_error("log(mu) has zero variance; cannot regress");
  }
  PhiRegression reg;
  reg.slope = sxy / sxx;
  reg.intercept = my - reg.slope * mx;
  reg.b = 2.0 - reg.slope;
  reg.c = 2.0 * std::exp(reg.intercept);
  return reg;
}

std::pair<ScoreSpec, ScoreForm> assemble_score_spec(double tau, double g_scale,
                                                    const PhiRegression& all,
                                                    const PhiRegression& large,
                                                    const PhiRegression& small) {
  const bool minus_ok = small.b > 1.0;  // phi_- needs b > 1
  const bool plus_ok = large.b < 1.0;   // phi_+ needs b < 1
  if (minus_ok && plus_ok) {
    return {ScoreSpec::additive({small.b, small.c}, {large.b, large.c}, g_scale, tau),
            ScoreForm::Additive};
  }
  if (plus_ok) {
    return {ScoreSpec::revelation_plus({all.b, all.c}, {large.b, large.c}, g_scale, tau),
            ScoreForm::RevelationPlus};
  }
  if (minus_ok) {
    return {ScoreSpec::revelation_minus({all.b, all.c}, {small.b, small.c}, g_scale, tau),
            ScoreForm::RevelationMinus};
  }
  throw domain_error(
      "no feasible score form: fitted b values are (all " +
      std::to_string(all.b) + ", large " + std::to_string(large.b) + ", small " +
      std::to_string(small.b) + "); need b < 1 for phi_+ or b > 1 for phi_-");
}

std::pair<ScoreSpec, PhiSelection> select_composite_spec(
    const Dataset& data, double tau, const std::vector<double>& mu_hat,
    const std::vector<double>& q_hat, const NetworkConfig& refit_net,
    const TrainConfig& refit_train, double g_scale) {
  data.validate();
  if (mu_hat.size() != static_cast<std::size_t>(data.size()) ||
      q_hat.size() != static_cast<std::size_t>(data.size())) {
    throw domain_error("prediction vectors must match the dataset length");
  }

  // Split at the estimated conditional quantile.
  std::vector<Eigen::Index> small_idx, large_idx;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    (data.responses(i) <= q_hat[i] ? small_idx : large_idx).push_back(i);
  }
  if (small_idx.size() < 10 || large_idx.size() < 10) {
    throw domain_error("quantile split leaves too few observations per side");
  }

  PhiSelection sel;
  {
    std::vector<double> y(data.responses.data(),
                          data.responses.data() + data.size());
    sel.all_claims = residual_loglog_regression(mu_hat, y);
  }
  {
    const auto preds = refit_mean_predictions(data, large_idx, refit_net, refit_train);
    std::vector<double> y;
    y.reserve(large_idx.size());
    for (auto i : large_idx) y.push_back(data.responses(i));
    sel.large_claims = residual_loglog_regression(preds, y);
  }
  {
    const auto preds = refit_mean_predictions(data, small_idx, refit_net, refit_train);
    std::vector<double> y;
    y.reserve(small_idx.size());
    for (auto i : small_idx) y.push_back(data.responses(i));
    sel.small_claims = residual_loglog_regression(preds, y);
  }

  auto [spec, form] = assemble_score_spec(tau, g_scale, sel.all_claims,
                                          sel.large_claims, sel.small_claims);
  sel.chosen_form = form;
  return {std::move(spec), std::move(sel)};
}

}  // namespace dqr
