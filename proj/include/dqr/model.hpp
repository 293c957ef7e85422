#pragma once

#include <string>
#include <vector>

#include "dqr/data_io.hpp"
#include "dqr/network.hpp"

namespace dqr {

/// A trained multi-start model: architecture, resolved objective, the feature
/// encoding it expects, and the best parameters of every surviving start.
/// Predictions are the arithmetic mean over starts on the response scale.
/// Serializes to JSON with a shape header and flat coefficient vectors
/// (layers then heads); the numeric round trip is bit exact.
struct FittedModel {
  NetworkConfig config;
  Objective objective;
  std::vector<FeatureColumn> columns;
  std::string response_name = "y";
  std::vector<NetworkParams> starts;

  /// Averaged head outputs on a dataset already expressed in this model's
  /// column layout (see align_to_columns).
  Eigen::MatrixXd predict_on(const Dataset& aligned) const;

  void save(const std::string& path) const;
  static FittedModel load(const std::string& path);
};

std::string head_kind_name(HeadKind head);
HeadKind head_kind_from_name(const std::string& name);
std::string score_form_name(ScoreForm form);

}  // namespace dqr
