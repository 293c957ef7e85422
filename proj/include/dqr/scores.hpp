#pragma once

#include <optional>
#include <stdexcept>
#include <tuple>

namespace dqr {

/// Thrown when an argument leaves the mathematical domain of an operation.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index (b, c) into the one-parameter convex family
///   phi_b(y) = 2 y^b / (b(b-1)),   b not in {0, 1},
///   phi_0(y) = -2 log y,           phi_1(y) = 2 y log y - 2 y,
/// scaled by c/2. phi_b'' (y) = 2 y^(b-2) > 0 for every b, so each member is
/// strictly convex on (0, inf). For b outside (1, 2) the induced Bregman
/// divergence is the Tweedie deviance with power p = 2 - b.
struct PhiIndex {
  double b = 0.0;
  double c = 2.0;
};

enum class ScoreForm {
  Additive,         // Phi(e-, e+) = phi_-(e-) + phi_+(e+)
  RevelationPlus,   // Phi(e-, e+) = phi(tau e- + (1-tau) e+) + phi_+(e+)
  RevelationMinus,  // Phi(e-, e+) = phi(tau e- + (1-tau) e+) + phi_-(e-)
};

/// Prediction triplet (lower ES, tau-quantile, upper ES) in claim units.
/// Construction enforces 0 < e_minus <= v <= e_plus.
class CompositeTriplet {
 public:
  CompositeTriplet(double e_minus, double v, double e_plus);

  double e_minus() const { return e_minus_; }
  double v() const { return v_; }
  double e_plus() const { return e_plus_; }

 private:
  double e_minus_;
  double v_;
  double e_plus_;
};

/// Fully determines a strictly consistent score for the composite triplet:
/// the Phi form, the (b, c) indices of its convex pieces, the slope c_tau of
/// g(y) = c_tau * y, and the probability level.
///
/// Use the named constructors; they validate the sign constraints
/// (b > 1 for phi_-, b < 1 for phi_+) and spot-check that the induced
/// v-section G_{e-,e+} is strictly increasing.
class ScoreSpec {
 public:
  static ScoreSpec additive(PhiIndex phi_minus, PhiIndex phi_plus,
                            double g_scale, double tau);
  static ScoreSpec revelation_plus(PhiIndex phi, PhiIndex phi_plus,
                                   double g_scale, double tau);
  static ScoreSpec revelation_minus(PhiIndex phi, PhiIndex phi_minus,
                                    double g_scale, double tau);

  ScoreForm form() const { return form_; }
  const std::optional<PhiIndex>& phi() const { return phi_; }
  const std::optional<PhiIndex>& phi_minus() const { return phi_minus_; }
  const std::optional<PhiIndex>& phi_plus() const { return phi_plus_; }
  double g_scale() const { return g_scale_; }
  double tau() const { return tau_; }

 private:
  ScoreSpec(ScoreForm form, std::optional<PhiIndex> phi,
            std::optional<PhiIndex> phi_minus, std::optional<PhiIndex> phi_plus,
            double g_scale, double tau);

  ScoreForm form_;
  std::optional<PhiIndex> phi_;
  std::optional<PhiIndex> phi_minus_;
  std::optional<PhiIndex> phi_plus_;
  double g_scale_;
  double tau_;
};

/// Pinball loss (y - a)(tau - 1{y <= a}); >= 0, zero iff y == a.
double pinball_loss(double y, double a, double tau);

/// The pair (S-_tau(y;a), S+_tau(y;a)) with
///   S-_tau(y;a) = (1{y<=a} - tau) a - 1{y<=a} y,
///   S+_tau(y;a) = S-_tau(y;a) + y.
/// Both are consistent for the tau-quantile; they differ from the pinball
/// loss only by terms constant in a.
std::pair<double, double> s_pair(double y, double a, double tau);

/// phi_b and its first two derivatives; `order` in {0, 1, 2}.
/// y is clamped to >= 1e-12 before evaluation (responses are positive by
/// model assumption; the clamp only shields float underflow).
double tweedie_phi(double b, double y, int order);

/// Bregman divergence of phi_b: phi_b(y) - phi_b(a) - phi_b'(a)(y - a),
/// in closed form. >= 0 with equality iff y == a.
double bregman_loss(double y, double a, double b);

/// Strictly consistent score L(y; e-, v, e+) for the composite triplet under
/// `spec`. Nonnegative, and L(y; y, y, y) = 0.
double composite_score(double y, const CompositeTriplet& t, const ScoreSpec& spec);

/// Analytic partials (dL/de-, dL/dv, dL/de+) of composite_score.
/// At the kink y == v the indicator 1{y<=v} is evaluated literally, i.e. the
/// left-limit subgradient branch is returned.
std::tuple<double, double, double> composite_score_gradient(
    double y, const CompositeTriplet& t, const ScoreSpec& spec);

}  // namespace dqr
