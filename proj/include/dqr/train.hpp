#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqr/data_io.hpp"
#include "dqr/identification.hpp"
#include "dqr/network.hpp"

namespace dqr {

/// Mini-batch adaptive-moment descent settings. eta_weights empty means AUTO:
/// weights are derived from intercept-only pinball losses on the training
/// split so every level contributes roughly equally to the total score.
struct TrainConfig {
  int batch_size = 512;
  int max_epochs = 500;
  int patience = 15;
  double learning_rate = 1e-3;
  std::pair<double, double> moment_decays = {0.9, 0.999};
  bool nesterov = false;  // nadam flavor of the update
  int n_starts = 5;
  double val_fraction = 0.2;
  std::vector<double> eta_weights;  // empty = AUTO
  std::uint64_t seed = 1;
  bool freeze_hidden = false;  // keep hidden layers at their initial values
  int threads = 0;             // 0 = one thread per start, capped by hardware

  void validate() const;
};

struct EpochTrace {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct StartResult {
  std::uint64_t seed = 0;
  NetworkParams best_params;
  double best_val_loss = 0.0;
  int best_epoch = 0;
  std::vector<EpochTrace> trace;
  bool failed = false;
  std::string diagnostic;
};

/// Outcome of a multi-start fit: per-start best parameters and loss traces,
/// plus per-instance predictions averaged over the surviving starts
/// (response scale) on the evaluation set.
struct FitReport {
  std::vector<StartResult> starts;
  std::vector<double> eta;             // resolved weights (quantile objectives)
  Eigen::MatrixXd eval_predictions;    // rows of the eval set (or val split)
  double eval_objective = 0.0;         // mean objective of averaged predictions
  std::optional<CalibrationReport> calibration;  // composite head only
};

/// Disjoint, exhaustive, seed-reproducible train/validation split,
/// stratified by response decile. Requires at least 10 rows.
std::pair<Dataset, Dataset> split_learn(const Dataset& data, double val_fraction,
                                        std::uint64_t seed);

/// AUTO weights: eta_j = 1 / (intercept-only pinball loss at level tau_j),
/// i.e. the minimal mean pinball attained at the empirical quantile. Falls
/// back to 1 for levels with zero loss (constant samples).
std::vector<double> auto_eta(const Dataset& data, const std::vector<double>& levels);

/// M-estimation: for each start, mini-batch adaptive-moment descent with
/// validation-based early stopping, restoring the best-validation
/// parameters; predictions are averaged across starts on the response
/// scale. When `eval` is absent the validation split doubles as the
/// evaluation set.
FitReport fit(const Dataset& learn, const std::optional<Dataset>& eval,
              const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
              Objective objective);

/// Averaged predictions of a set of parameter vectors on a feature matrix.
Eigen::MatrixXd average_predictions(const std::vector<NetworkParams>& starts,
                                    const Eigen::MatrixXd& X,
                                    const NetworkConfig& cfg);

}  // namespace dqr
