#include "dqr/network.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dqr {

namespace {

// Inner products are clamped to [-30, 30] before exp / sigmoid to prevent
// overflow; the clamp leaves the gradient path except at saturation.
constexpr double kScoreClamp = 30.0;

inline double clamp_score(double s) {
  return s < -kScoreClamp ? -kScoreClamp : (s > kScoreClamp ? kScoreClamp : s);
}
inline double clamp_mask(double s) {
  return (s >= -kScoreClamp && s <= kScoreClamp) ? 1.0 : 0.0;
}
inline double exp_clamped(double s) { return std::exp(clamp_score(s)); }
inline double sigmoid_clamped(double s) {
  return 1.0 / (1.0 + std::exp(-clamp_score(s)));
}

void check_levels(const std::vector<double>& levels) {
  if (levels.empty()) {
    throw domain_error("levels must be nonempty");
  }
  double prev = 0.0;
  for (double t : levels) {
    if (!(t > 0.0 && t < 1.0)) {
      throw domain_error("levels must lie in (0,1)");
    }
    if (!(t > prev)) {
      throw domain_error("levels must be strictly increasing");
    }
    prev = t;
  }
}

struct Forward {
  std::vector<Eigen::MatrixXd> acts;  // A_0 .. A_d, each n x (r_m + 1)
  Eigen::MatrixXd scores;             // n x K raw head inner products
};

Eigen::Map<const Eigen::MatrixXd> head_matrix(const NetworkParams& params,
                                              int rep_dim) {
  return Eigen::Map<const Eigen::MatrixXd>(
      params.flat().data() + params.head_offset(), rep_dim,
      params.head_count());
}

Forward run_forward(const Eigen::MatrixXd& X, const NetworkParams& params,
                    const NetworkConfig& cfg) {
  if (X.cols() != cfg.input_dim + 1) {
    throw domain_error("feature matrix width " + std::to_string(X.cols()) +
                       " does not match input_dim+1 = " +
                       std::to_string(cfg.input_dim + 1));
  }
  Forward fw;
  const int depth = static_cast<int>(cfg.hidden_dims.size());
  fw.acts.reserve(depth + 1);
  fw.acts.push_back(X);
  for (int m = 0; m < depth; ++m) {
    const auto W = params.layer(m);
    const Eigen::MatrixXd S = fw.acts.back() * W.transpose();
    Eigen::MatrixXd A(X.rows(), cfg.hidden_dims[m] + 1);
    A.col(0).setOnes();
    A.rightCols(cfg.hidden_dims[m]) = S.array().tanh();
    fw.acts.push_back(std::move(A));
  }
  const int rep_dim = cfg.hidden_dims.back() + 1;
  fw.scores = fw.acts.back() * head_matrix(params, rep_dim);
  return fw;
}

// Per-sample loss and, when dC != nullptr, the derivatives with respect to
// the K raw scores (clamp mask included).
double sample_loss_grad(const Objective& obj, const NetworkConfig& cfg,
                        double y, const double* s, int K, double* dC) {
  switch (obj.kind) {
    case Objective::Kind::Composite: {
      const double inc1 = exp_clamped(s[0]);
      const double inc2 = exp_clamped(s[1]);
      const double inc3 = exp_clamped(s[2]);
      const CompositeTriplet t(inc1, inc1 + inc2, inc1 + inc2 + inc3);
      const double loss = composite_score(y, t, *obj.spec);
      if (dC) {
        const auto [de_minus, dv, de_plus] = composite_score_gradient(y, t, *obj.spec);
        dC[0] = (de_minus + dv + de_plus) * inc1 * clamp_mask(s[0]);
        dC[1] = (dv + de_plus) * inc2 * clamp_mask(s[1]);
        dC[2] = de_plus * inc3 * clamp_mask(s[2]);
      }
      return loss;
    }
    case Objective::Kind::BregmanMean: {
      const double mu = exp_clamped(s[0]);
      const double loss = 0.5 * obj.bregman_c * bregman_loss(y, mu, obj.bregman_b);
      if (dC) {
        const double dmu =
            -0.5 * obj.bregman_c * tweedie_phi(obj.bregman_b, mu, 2) * (y - mu);
        dC[0] = dmu * mu * clamp_mask(s[0]);
      }
      return loss;
    }
    case Objective::Kind::MultiQuantile:
    default: {
      double loss = 0.0;
      if (cfg.head == HeadKind::MultiQuantileAdditive) {
        double q = 0.0;
        double suffix = 0.0;  // filled backwards below
        std::vector<double> g(K);
        for (int j = 0; j < K; ++j) {
          q += exp_clamped(s[j]);
          const double tau = obj.levels[j];
          loss += obj.eta[j] * pinball_loss(y, q, tau);
          g[j] = obj.eta[j] * ((y <= q ? 1.0 : 0.0) - tau);
        }
        if (dC) {
          for (int k = K - 1; k >= 0; --k) {
            suffix += g[k];
            dC[k] = exp_clamped(s[k]) * suffix * clamp_mask(s[k]);
          }
        }
      } else {  // multiplicative, top level first
        std::vector<double> q(K);
        q[K - 1] = exp_clamped(s[K - 1]);
        for (int j = K - 2; j >= 0; --j) {
          q[j] = sigmoid_clamped(s[j]) * q[j + 1];
        }
        std::vector<double> gq(K);
        for (int j = 0; j < K; ++j) {
          const double tau = obj.levels[j];
          loss += obj.eta[j] * pinball_loss(y, q[j], tau);
          gq[j] = obj.eta[j] * ((y <= q[j] ? 1.0 : 0.0) - tau) * q[j];
        }
        if (dC) {
          double prefix = 0.0;
          for (int l = 0; l < K - 1; ++l) {
            prefix += gq[l];
            dC[l] = prefix * (1.0 - sigmoid_clamped(s[l])) * clamp_mask(s[l]);
          }
          dC[K - 1] = (prefix + gq[K - 1]) * clamp_mask(s[K - 1]);
        }
      }
      return loss;
    }
  }
}

}  // namespace

int NetworkConfig::head_count() const {
  return head == HeadKind::CompositeAdditive ? 3
                                             : static_cast<int>(levels.size());
}

std::size_t NetworkConfig::parameter_count() const {
  std::size_t r = 0;
  int prev = input_dim;
  for (int h : hidden_dims) {
    r += static_cast<std::size_t>(h) * (prev + 1);
    prev = h;
  }
  r += static_cast<std::size_t>(head_count()) * (prev + 1);
  return r;
}

void NetworkConfig::validate() const {
  if (input_dim < 0) {
    throw domain_error("input_dim must be >= 0");
  }
  if (hidden_dims.empty()) {
    throw domain_error("hidden_dims must be nonempty");
  }
  for (int h : hidden_dims) {
    if (h < 1) throw domain_error("hidden layer dimensions must be >= 1");
  }
  check_levels(levels);
  if (head == HeadKind::CompositeAdditive && levels.size() != 1) {
    throw domain_error("composite head requires a single level tau");
  }
}

NetworkParams::NetworkParams(const NetworkConfig& cfg, Eigen::VectorXd theta)
    : head_count_(cfg.head_count()), theta_(std::move(theta)) {
  dims_.push_back(cfg.input_dim);
  for (int h : cfg.hidden_dims) dims_.push_back(h);
  std::size_t off = 0;
  for (std::size_t m = 1; m < dims_.size(); ++m) {
    off += static_cast<std::size_t>(dims_[m]) * (dims_[m - 1] + 1);
  }
  head_offset_ = off;
}

NetworkParams NetworkParams::zeros(const NetworkConfig& cfg) {
  cfg.validate();
  return NetworkParams(
      cfg, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.parameter_count())));
}

NetworkParams NetworkParams::glorot(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Eigen::VectorXd theta(static_cast<Eigen::Index>(cfg.parameter_count()));
  std::mt19937_64 rng(seed);
  Eigen::Index pos = 0;
  int prev = cfg.input_dim;
  auto fill_block = [&](Eigen::Index count, int fan_in, int fan_out) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Eigen::Index i = 0; i < count; ++i) theta(pos++) = dist(rng);
  };
  for (int h : cfg.hidden_dims) {
    fill_block(static_cast<Eigen::Index>(h) * (prev + 1), prev + 1, h);
    prev = h;
  }
  for (int k = 0; k < cfg.head_count(); ++k) {
    fill_block(prev + 1, prev + 1, 1);
  }
  return NetworkParams(cfg, std::move(theta));
}

NetworkParams NetworkParams::from_flat(const NetworkConfig& cfg, Eigen::VectorXd theta) {
  cfg.validate();
  if (static_cast<std::size_t>(theta.size()) != cfg.parameter_count()) {
    throw domain_error("flat parameter vector has wrong length");
  }
  return NetworkParams(cfg, std::move(theta));
}

Eigen::Map<const Eigen::MatrixXd> NetworkParams::layer(int m) const {
  std::size_t off = 0;
  for (int i = 0; i < m; ++i) {
    off += static_cast<std::size_t>(dims_[i + 1]) * (dims_[i] + 1);
  }
  return Eigen::Map<const Eigen::MatrixXd>(theta_.data() + off, dims_[m + 1],
                                           dims_[m] + 1);
}

Eigen::Map<Eigen::MatrixXd> NetworkParams::layer(int m) {
  std::size_t off = 0;
  for (int i = 0; i < m; ++i) {
    off += static_cast<std::size_t>(dims_[i + 1]) * (dims_[i] + 1);
  }
  return Eigen::Map<Eigen::MatrixXd>(theta_.data() + off, dims_[m + 1],
                                     dims_[m] + 1);
}

Eigen::Map<const Eigen::VectorXd> NetworkParams::head(int k) const {
  const int rep_dim = dims_.back() + 1;
  return Eigen::Map<const Eigen::VectorXd>(
      theta_.data() + head_offset_ + static_cast<std::size_t>(k) * rep_dim, rep_dim);
}

Eigen::Map<Eigen::VectorXd> NetworkParams::head(int k) {
  const int rep_dim = dims_.back() + 1;
  return Eigen::Map<Eigen::VectorXd>(
      theta_.data() + head_offset_ + static_cast<std::size_t>(k) * rep_dim, rep_dim);
}

Objective Objective::multi_quantile(std::vector<double> levels,
                                    std::vector<double> eta) {
  check_levels(levels);
  // Empty eta means AUTO: fit() resolves the weights on the training split.
  if (!eta.empty() && eta.size() != levels.size()) {
    throw domain_error("eta weights must match levels");
  }
  for (double e : eta) {
    if (!(e > 0.0)) throw domain_error("eta weights must be > 0");
  }
  Objective obj;
  obj.kind = Kind::MultiQuantile;
  obj.levels = std::move(levels);
  obj.eta = std::move(eta);
  return obj;
}

Objective Objective::composite(ScoreSpec spec) {
  Objective obj;
  obj.kind = Kind::Composite;
  obj.spec = std::move(spec);
  return obj;
}

Objective Objective::bregman_mean(double b, double c) {
  if (!(c > 0.0)) throw domain_error("bregman scale c must be > 0");
  Objective obj;
  obj.kind = Kind::BregmanMean;
  obj.bregman_b = b;
  obj.bregman_c = c;
  return obj;
}

void Objective::validate_against(const NetworkConfig& cfg) const {
  switch (kind) {
    case Kind::MultiQuantile:
      if (cfg.head != HeadKind::MultiQuantileAdditive &&
          cfg.head != HeadKind::MultiQuantileMultiplicative) {
        throw domain_error("multi-quantile objective requires a quantile head");
      }
      if (levels != cfg.levels) {
        throw domain_error("objective levels do not match network levels");
      }
      if (!eta.empty() && eta.size() != levels.size()) {
        throw domain_error("eta weights must match levels");
      }
      break;
    case Kind::Composite:
      if (cfg.head != HeadKind::CompositeAdditive) {
        throw domain_error("composite objective requires the composite head");
      }
      if (!spec) {
        throw domain_error("composite objective requires a ScoreSpec");
      }
      if (cfg.levels.size() != 1 || spec->tau() != cfg.levels[0]) {
        throw domain_error("ScoreSpec tau does not match network level");
      }
      break;
    case Kind::BregmanMean:
      if (cfg.head != HeadKind::MultiQuantileAdditive || cfg.head_count() != 1) {
        throw domain_error("mean objective requires a single-output additive head");
      }
      break;
  }
}

Eigen::VectorXd forward_representation(const Eigen::VectorXd& x,
                                       const NetworkParams& params,
                                       const NetworkConfig& cfg) {
  if (x.size() != cfg.input_dim + 1) {
    throw domain_error("input vector has wrong dimension");
  }
  Eigen::MatrixXd X = x.transpose();
  const Forward fw = run_forward(X, params, cfg);
  return fw.acts.back().row(0).transpose();
}

Eigen::MatrixXd representation(const Eigen::MatrixXd& X,
                               const NetworkParams& params,
                               const NetworkConfig& cfg) {
  return run_forward(X, params, cfg).acts.back();
}

std::vector<double> head_multi_quantile_additive(
    const Eigen::VectorXd& z, const std::vector<Eigen::VectorXd>& betas,
    const std::vector<double>& levels) {
  if (betas.size() != levels.size() || betas.empty()) {
    throw domain_error("one head vector per level required");
  }
  std::vector<double> q(betas.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < betas.size(); ++j) {
    if (betas[j].size() != z.size()) {
      throw domain_error("head vector dimension mismatch");
    }
    acc += exp_clamped(betas[j].dot(z));
    q[j] = acc;
  }
  return q;
}

std::vector<double> head_multi_quantile_multiplicative(
    const Eigen::VectorXd& z, const std::vector<Eigen::VectorXd>& betas,
    const std::vector<double>& levels) {
  if (betas.size() != levels.size() || betas.empty()) {
    throw domain_error("one head vector per level required");
  }
  const std::size_t K = betas.size();
  for (const auto& beta : betas) {
    if (beta.size() != z.size()) {
      throw domain_error("head vector dimension mismatch");
    }
  }
  std::vector<double> q(K);
  q[K - 1] = exp_clamped(betas[K - 1].dot(z));
  for (std::size_t j = K - 1; j-- > 0;) {
    q[j] = sigmoid_clamped(betas[j].dot(z)) * q[j + 1];
  }
  return q;
}

CompositeTriplet head_composite(const Eigen::VectorXd& z,
                                const Eigen::VectorXd& beta1,
                                const Eigen::VectorXd& beta2,
                                const Eigen::VectorXd& beta3) {
  if (beta1.size() != z.size() || beta2.size() != z.size() ||
      beta3.size() != z.size()) {
    throw domain_error("head vector dimension mismatch");
  }
  const double e_minus = exp_clamped(beta1.dot(z));
  const double v = e_minus + exp_clamped(beta2.dot(z));
  const double e_plus = v + exp_clamped(beta3.dot(z));
  return CompositeTriplet(e_minus, v, e_plus);
}

Eigen::MatrixXd predict(const Eigen::MatrixXd& X, const NetworkParams& params,
                        const NetworkConfig& cfg) {
  cfg.validate();
  const Forward fw = run_forward(X, params, cfg);
  const int K = cfg.head_count();
  Eigen::MatrixXd out(X.rows(), K);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    switch (cfg.head) {
      case HeadKind::MultiQuantileAdditive: {
        double acc = 0.0;
        for (int j = 0; j < K; ++j) {
          acc += exp_clamped(fw.scores(i, j));
          out(i, j) = acc;
        }
        break;
      }
      case HeadKind::MultiQuantileMultiplicative: {
        out(i, K - 1) = exp_clamped(fw.scores(i, K - 1));
        for (int j = K - 2; j >= 0; --j) {
          out(i, j) = sigmoid_clamped(fw.scores(i, j)) * out(i, j + 1);
        }
        break;
      }
      case HeadKind::CompositeAdditive: {
        const double e_minus = exp_clamped(fw.scores(i, 0));
        const double v = e_minus + exp_clamped(fw.scores(i, 1));
        out(i, 0) = e_minus;
        out(i, 1) = v;
        out(i, 2) = v + exp_clamped(fw.scores(i, 2));
        break;
      }
    }
  }
  return out;
}

BatchGradient gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const NetworkParams& params, const NetworkConfig& cfg,
                       const Objective& objective) {
  cfg.validate();
  objective.validate_against(cfg);
  if (objective.kind == Objective::Kind::MultiQuantile &&
      objective.eta.size() != objective.levels.size()) {
    throw domain_error("eta weights are unresolved; fit() expands AUTO weights");
  }
  if (y.size() != X.rows() || X.rows() == 0) {
    throw domain_error("batch feature/response sizes do not match");
  }
  const Forward fw = run_forward(X, params, cfg);
  const Eigen::Index n = X.rows();
  const int K = cfg.head_count();
  const int depth = static_cast<int>(cfg.hidden_dims.size());
  const int rep_dim = cfg.hidden_dims.back() + 1;

  Eigen::MatrixXd dS(n, K);
  double loss_sum = 0.0;
  std::vector<double> srow(K), drow(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) srow[k] = fw.scores(i, k);
    loss_sum += sample_loss_grad(objective, cfg, y(i), srow.data(), K, drow.data());
    for (int k = 0; k < K; ++k) dS(i, k) = drow[k];
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  BatchGradient result;
  result.loss = loss_sum * inv_n;
  result.grad = Eigen::VectorXd::Zero(params.flat().size());

  Eigen::Map<Eigen::MatrixXd> grad_heads(result.grad.data() + params.head_offset(),
                                         rep_dim, K);
  grad_heads = fw.acts.back().transpose() * dS * inv_n;

  // Back through the representation layers.
  Eigen::MatrixXd dA = dS * head_matrix(params, rep_dim).transpose();
  std::size_t layer_end = params.head_offset();
  for (int m = depth - 1; m >= 0; --m) {
    const int r_m = cfg.hidden_dims[m];
    const Eigen::MatrixXd D =
        dA.rightCols(r_m).array() *
        (1.0 - fw.acts[m + 1].rightCols(r_m).array().square());
    const Eigen::Index in_dim = fw.acts[m].cols();
    layer_end -= static_cast<std::size_t>(r_m) * in_dim;
    Eigen::Map<Eigen::MatrixXd> grad_layer(result.grad.data() + layer_end, r_m,
                                           in_dim);
    grad_layer = D.transpose() * fw.acts[m] * inv_n;
    if (m > 0) dA = D * params.layer(m);
  }
  return result;
}

double batch_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const NetworkParams& params, const NetworkConfig& cfg,
                  const Objective& objective) {
  cfg.validate();
  objective.validate_against(cfg);
  if (objective.kind == Objective::Kind::MultiQuantile &&
      objective.eta.size() != objective.levels.size()) {
    throw domain_error("eta weights are unresolved; fit() expands AUTO weights");
  }
  if (y.size() != X.rows() || X.rows() == 0) {
    throw domain_error("batch feature/response sizes do not match");
  }
  const Forward fw = run_forward(X, params, cfg);
  const int K = cfg.head_count();
  double loss_sum = 0.0;
  std::vector<double> srow(K);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int k = 0; k < K; ++k) srow[k] = fw.scores(i, k);
    loss_sum += sample_loss_grad(objective, cfg, y(i), srow.data(), K, nullptr);
  }
  return loss_sum / static_cast<double>(X.rows());
}

}  // namespace dqr
