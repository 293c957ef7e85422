#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "dqr/scores.hpp"

namespace dqr {

enum class Activation { Tanh };
enum class HeadKind {
  MultiQuantileAdditive,        // Q_1 = exp<b1,z>, Q_{j+1} = Q_j + exp<b_{j+1},z>
  MultiQuantileMultiplicative,  // Q_K = exp<b_K,z>, Q_j = sigmoid<b_j,z> * Q_{j+1}
  CompositeAdditive,            // e- = exp<b1,z>, v = e- + exp<b2,z>, e+ = v + exp<b3,z>
};
enum class Link { Log };

/// Architecture of the shared feed-forward representation plus output head.
/// input_dim counts feature components, excluding the leading constant 1;
/// vectors passed through the network carry that constant in position 0.
struct NetworkConfig {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  Activation activation = Activation::Tanh;
  HeadKind head = HeadKind::MultiQuantileAdditive;
  std::vector<double> levels;  // quantile levels, or the single tau for the composite head
  Link link = Link::Log;
  std::uint64_t seed = 1;

  int head_count() const;
  std::size_t parameter_count() const;
  void validate() const;
};

/// Layer weights w^(m) of shape r_m x (r_{m-1}+1) followed by the head
/// vectors beta_k of length r_d+1, stored as one flat coefficient vector
/// (layers first, column-major within a layer, then heads).
class NetworkParams {
 public:
  NetworkParams() = default;

  static NetworkParams zeros(const NetworkConfig& cfg);
  /// Symmetric uniform(-a, a) with a = sqrt(6/(fan_in+fan_out)) per block.
  static NetworkParams glorot(const NetworkConfig& cfg, std::uint64_t seed);
  /// Rebuild from a flat coefficient vector (layers then heads).
  static NetworkParams from_flat(const NetworkConfig& cfg, Eigen::VectorXd theta);

  Eigen::VectorXd& flat() { return theta_; }
  const Eigen::VectorXd& flat() const { return theta_; }

  Eigen::Map<const Eigen::MatrixXd> layer(int m) const;
  Eigen::Map<Eigen::MatrixXd> layer(int m);
  Eigen::Map<const Eigen::VectorXd> head(int k) const;
  Eigen::Map<Eigen::VectorXd> head(int k);

  int depth() const { return static_cast<int>(dims_.size()) - 1; }
  int head_count() const { return head_count_; }
  /// Offset of the first head coefficient within the flat vector.
  std::size_t head_offset() const { return head_offset_; }
  std::size_t size() const { return static_cast<std::size_t>(theta_.size()); }

 private:
  NetworkParams(const NetworkConfig& cfg, Eigen::VectorXd theta);

  std::vector<int> dims_;  // r0, r1, ..., rd
  int head_count_ = 0;
  std::size_t head_offset_ = 0;
  Eigen::VectorXd theta_;
};

/// Training objective paired with a head. The pairing is validated before
/// any gradient work: pinball sums go with quantile heads, the composite
/// score with the composite head, and a Bregman mean loss with a
/// single-output additive head (used for the pre-fit mean models).
struct Objective {
  enum class Kind { MultiQuantile, Composite, BregmanMean };

  Kind kind = Kind::MultiQuantile;
  std::vector<double> levels;
  std::vector<double> eta;  // per-level weights, resolved (no AUTO here)
  std::optional<ScoreSpec> spec;
  double bregman_b = 0.0;
  double bregman_c = 2.0;

  static Objective multi_quantile(std::vector<double> levels, std::vector<double> eta);
  static Objective composite(ScoreSpec spec);
  static Objective bregman_mean(double b, double c = 2.0);

  void validate_against(const NetworkConfig& cfg) const;
};

/// z^(d:1)(x): the learned representation with leading constant 1.
/// x must have dimension input_dim+1 with x(0) == 1.
Eigen::VectorXd forward_representation(const Eigen::VectorXd& x,
                                       const NetworkParams& params,
                                       const NetworkConfig& cfg);

/// Batched representations, one row per input row.
Eigen::MatrixXd representation(const Eigen::MatrixXd& X,
                               const NetworkParams& params,
                               const NetworkConfig& cfg);

/// Output heads on a single representation. Monotonicity and positivity of
/// the outputs hold structurally for arbitrary finite parameters.
std::vector<double> head_multi_quantile_additive(
    const Eigen::VectorXd& z, const std::vector<Eigen::VectorXd>& betas,
    const std::vector<double>& levels);
std::vector<double> head_multi_quantile_multiplicative(
    const Eigen::VectorXd& z, const std::vector<Eigen::VectorXd>& betas,
    const std::vector<double>& levels);
CompositeTriplet head_composite(const Eigen::VectorXd& z,
                                const Eigen::VectorXd& beta1,
                                const Eigen::VectorXd& beta2,
                                const Eigen::VectorXd& beta3);

/// Head outputs for every row of X: one column per quantile level, or the
/// columns (e-, v, e+) for the composite head, or the single mean column.
Eigen::MatrixXd predict(const Eigen::MatrixXd& X, const NetworkParams& params,
                        const NetworkConfig& cfg);

struct BatchGradient {
  double loss = 0.0;       // mean objective over the batch
  Eigen::VectorXd grad;    // same layout as NetworkParams::flat()
};

/// Mean objective over the batch and its exact gradient in the parameters
/// (reverse-mode through the representation and head).
BatchGradient gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const NetworkParams& params, const NetworkConfig& cfg,
                       const Objective& objective);

/// Mean objective only (validation passes).
double batch_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const NetworkParams& params, const NetworkConfig& cfg,
                  const Objective& objective);

}  // namespace dqr
