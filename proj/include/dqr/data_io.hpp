#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqr/scores.hpp"

namespace dqr {

enum class ColumnKind { Constant, Continuous, Binary, OneHot };

/// Identity and scaling metadata of one column of the feature matrix.
/// Continuous columns record the (min, max) used for the [0,1] scaling;
/// one-hot columns record the source column (`group`) and the level.
struct FeatureColumn {
  ColumnKind kind = ColumnKind::Continuous;
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::string group;
  std::string level;

  bool same_identity(const FeatureColumn& other) const {
    return kind == other.kind && name == other.name && group == other.group &&
           level == other.level;
  }
};

/// Response vector, encoded feature matrix (leading constant-1 column) and
/// per-column metadata; synthetic datasets carry the closed-form truth
/// triplets (e-, v, e+) per row.
struct Dataset {
  Eigen::VectorXd responses;
  Eigen::MatrixXd features;
  std::vector<FeatureColumn> columns;
  std::optional<Eigen::MatrixXd> truth;
  std::string response_name = "y";

  Eigen::Index size() const { return responses.size(); }
  int n_features() const { return static_cast<int>(features.cols()) - 1; }

  /// Row subset, preserving metadata and truth.
  Dataset rows(const std::vector<Eigen::Index>& idx) const;

  void validate() const;
};

/// Features ~ U(0,1)^q with leading intercept, mu(x) = exp<coeff_mu, x>,
/// Y ~ Gamma(shape, mean mu(x)); truth = closed-form gamma triplet per row.
/// coeff_mu includes the intercept coefficient in position 0.
Dataset simulate_gamma(std::size_t n, std::uint64_t seed,
                       const Eigen::VectorXd& coeff_mu, double gamma_shape,
                       double tau);

/// log Y ~ Normal(m(x), s(x)) with m = <coeff_m, x>, s = softplus<coeff_s, x>;
/// truth from the lognormal closed forms.
Dataset simulate_lognormal(std::size_t n, std::uint64_t seed,
                           const Eigen::VectorXd& coeff_m,
                           const Eigen::VectorXd& coeff_s, double tau);

/// Parse a CSV file (header row, comma separator, '.' decimal point) against
/// a sidecar schema mapping columns to kinds:
///   response = <column>
///   feature.<column> = continuous | binary | categorical
/// Categoricals are one-hot encoded (levels in sorted order), continuous
/// columns min-max scaled into [0,1], and the constant-1 column prepended.
/// Nonpositive responses and unparsable cells are reported with their row.
Dataset load_csv(const std::string& csv_path, const std::string& schema_path);

/// Write responses and features back to CSV (round-trip exact numerals).
/// One-hot groups are written as the original categorical column.
void write_csv(const Dataset& data, const std::string& path);

/// Write / read a truth or prediction file with columns e_minus,v,e_plus.
void write_triplet_csv(const Eigen::MatrixXd& triplets, const std::string& path);
Eigen::MatrixXd load_triplet_csv(const std::string& path);

/// Disjoint, exhaustive, seed-reproducible partition stratified by response
/// decile (per-decile counts within +-1 of proportional). Continuous-column
/// scaling is recomputed on the learn part only and applied to both parts.
std::pair<Dataset, Dataset> split_stratified(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed);

/// Index-level stratified split used by split_stratified and by the
/// train/validation partition.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_split_indices(const Eigen::VectorXd& responses, double fraction,
                         std::uint64_t seed);

/// Re-express `data` in the column layout of `target`: identical column
/// identities required, continuous columns rescaled with the target's
/// (min, max). Throws on any shape mismatch.
Dataset align_to_columns(const Dataset& data,
                         const std::vector<FeatureColumn>& target);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace dqr
