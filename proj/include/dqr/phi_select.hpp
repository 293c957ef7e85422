#pragma once

#include <utility>
#include <vector>

#include "dqr/data_io.hpp"
#include "dqr/network.hpp"
#include "dqr/train.hpp"

namespace dqr {

/// One log-log regression of squared residuals on fitted means:
/// slope and intercept of OLS log((y - mu)^2) ~ log(mu), mapped to the
/// family index via b = 2 - slope, c = 2 exp(intercept).
struct PhiRegression {
  double intercept = 0.0;
  double slope = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// The three regressions (all / large / small claims) behind a data-driven
/// ScoreSpec, and the form they admit.
struct PhiSelection {
  PhiRegression all_claims;
  PhiRegression large_claims;
  PhiRegression small_claims;
  ScoreForm chosen_form = ScoreForm::RevelationPlus;
};

/// OLS of log((y_i - mu_i)^2) on log(mu_i); squared residuals are floored at
/// 1e-12 before the log. Requires at least 3 points and non-degenerate
/// spread in log(mu).
PhiRegression residual_loglog_regression(const std::vector<double>& mu_hat,
                                         const std::vector<double>& y);

/// Assemble a valid ScoreSpec from the three fitted regressions:
/// ADDITIVE when b- > 1 and b+ < 1, otherwise REVELATION_PLUS when b+ < 1,
/// otherwise REVELATION_MINUS when b- > 1; throws (listing the three b
/// values) when no form is feasible.
std::pair<ScoreSpec, ScoreForm> assemble_score_spec(double tau, double g_scale,
                                                    const PhiRegression& all,
                                                    const PhiRegression& large,
                                                    const PhiRegression& small);

/// Data-driven spec selection. mu_hat and q_hat are predictions of pre-fit
/// mean and tau-quantile models on the dataset rows. The sample splits at
/// the quantile predictions into small/large index sets; conditional mean
/// models are refit on each subset (gamma deviance, log link) and the three
/// residual regressions feed assemble_score_spec.
std::pair<ScoreSpec, PhiSelection> select_composite_spec(
    const Dataset& data, double tau, const std::vector<double>& mu_hat,
    const std::vector<double>& q_hat, const NetworkConfig& refit_net,
    const TrainConfig& refit_train, double g_scale = 1.0);

}  // namespace dqr
