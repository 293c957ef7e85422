#include "dqr/scores.hpp"

#include <cmath>
#include <string>

namespace dqr {

namespace {

constexpr double kPhiFloor = 1e-12;

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw domain_error("tau must lie in (0,1), got " + std::to_string(tau));
  }
}

void check_phi_index(const PhiIndex& idx, const char* role) {
  if (!(idx.c > 0.0)) {
    throw domain_error(std::string(role) + ": scale c must be > 0");
  }
}

// phi(y), phi'(y), phi''(y) for the scaled member (c/2) * phi_b.
struct ScaledPhi {
  PhiIndex idx;
  double value(double y) const { return 0.5 * idx.c * tweedie_phi(idx.b, y, 0); }
  double deriv(double y) const { return 0.5 * idx.c * tweedie_phi(idx.b, y, 1); }
  double second(double y) const { return 0.5 * idx.c * tweedie_phi(idx.b, y, 2); }
};

// Bregman-style building block phi'(e)(e - u) - phi(e) + phi(y), where u is
// the pseudo-observation the component tracks (-S-/tau, S+/(1-tau) or y).
double bregman_block(const ScaledPhi& p, double e, double u, double y) {
  return p.deriv(e) * (e - u) - p.value(e) + p.value(y);
}

}  // namespace

CompositeTriplet::CompositeTriplet(double e_minus, double v, double e_plus)
    : e_minus_(e_minus), v_(v), e_plus_(e_plus) {
  if (!(e_minus > 0.0)) {
    throw domain_error("composite triplet requires e_minus > 0");
  }
  if (!(e_minus <= v && v <= e_plus)) {
    throw domain_error("composite triplet requires e_minus <= v <= e_plus");
  }
}

ScoreSpec::ScoreSpec(ScoreForm form, std::optional<PhiIndex> phi,
                     std::optional<PhiIndex> phi_minus,
                     std::optional<PhiIndex> phi_plus, double g_scale,
                     double tau)
    : form_(form),
      phi_(phi),
      phi_minus_(phi_minus),
      phi_plus_(phi_plus),
      g_scale_(g_scale),
      tau_(tau) {
  check_tau(tau);
  if (!(g_scale >= 0.0)) {
    throw domain_error("g_scale must be >= 0");
  }
  if (phi_) check_phi_index(*phi_, "phi");
  if (phi_minus_) {
    check_phi_index(*phi_minus_, "phi_minus");
    if (!(phi_minus_->b > 1.0)) {
      throw domain_error("phi_minus requires b > 1 (phi' > 0 on (0,inf))");
    }
  }
  if (phi_plus_) {
    check_phi_index(*phi_plus_, "phi_plus");
    if (!(phi_plus_->b < 1.0)) {
      throw domain_error("phi_plus requires b < 1 (phi' < 0 on (0,inf))");
    }
  }
  // Numeric spot check that the v-section G_{e-,e+} is strictly increasing:
  // its slope is g_scale + phi_-'(e-)/tau - phi_+'(e+)/(1-tau) restricted to
  // the pieces present. The sign constraints make it positive analytically.
  for (double e : {0.5, 1.0, 5.0}) {
    double slope = g_scale_;
    if (phi_minus_) slope += ScaledPhi{*phi_minus_}.deriv(e) / tau_;
    if (phi_plus_) slope -= ScaledPhi{*phi_plus_}.deriv(e) / (1.0 - tau_);
    if (!(slope > 0.0)) {
      throw domain_error("induced G_{e-,e+} is not strictly increasing");
    }
  }
}

ScoreSpec ScoreSpec::additive(PhiIndex phi_minus, PhiIndex phi_plus,
                              double g_scale, double tau) {
  return ScoreSpec(ScoreForm::Additive, std::nullopt, phi_minus, phi_plus,
                   g_scale, tau);
}

ScoreSpec ScoreSpec::revelation_plus(PhiIndex phi, PhiIndex phi_plus,
                                     double g_scale, double tau) {
  return ScoreSpec(ScoreForm::RevelationPlus, phi, std::nullopt, phi_plus,
                   g_scale, tau);
}

ScoreSpec ScoreSpec::revelation_minus(PhiIndex phi, PhiIndex phi_minus,
                                      double g_scale, double tau) {
  return ScoreSpec(ScoreForm::RevelationMinus, phi, phi_minus, std::nullopt,
                   g_scale, tau);
}

double pinball_loss(double y, double a, double tau) {
  check_tau(tau);
  const double indicator = (y <= a) ? 1.0 : 0.0;
  return (y - a) * (tau - indicator);
}

std::pair<double, double> s_pair(double y, double a, double tau) {
  check_tau(tau);
  const double indicator = (y <= a) ? 1.0 : 0.0;
  const double s_minus = (indicator - tau) * a - indicator * y;
  return {s_minus, s_minus + y};
}

double tweedie_phi(double b, double y, int order) {
  if (!(y > 0.0)) {
    throw domain_error("tweedie_phi requires y > 0");
  }
  if (order < 0 || order > 2) {
    throw domain_error("tweedie_phi order must be 0, 1 or 2");
  }
  y = std::max(y, kPhiFloor);
  switch (order) {
    case 0:
      if (b == 0.0) return -2.0 * std::log(y);
      if (b == 1.0) return 2.0 * y * std::log(y) - 2.0 * y;
      return 2.0 / (b * (b - 1.0)) * std::pow(y, b);
    case 1:
      if (b == 0.0) return -2.0 / y;
      if (b == 1.0) return 2.0 * std::log(y);
      return 2.0 / (b - 1.0) * std::pow(y, b - 1.0);
    default:
      return 2.0 * std::pow(y, b - 2.0);
  }
}

double bregman_loss(double y, double a, double b) {
  if (!(y > 0.0) || !(a > 0.0)) {
    throw domain_error("bregman_loss requires y > 0 and a > 0");
  }
  if (y == a) return 0.0;
  y = std::max(y, kPhiFloor);
  a = std::max(a, kPhiFloor);
  if (b == 0.0) return 2.0 * (std::log(a / y) + (y - a) / a);
  if (b == 1.0) return 2.0 * (y * std::log(y / a) + a - y);
  return 2.0 * (std::pow(y, b) / (b * (b - 1.0)) -
                y * std::pow(a, b - 1.0) / (b - 1.0) + std::pow(a, b) / b);
}

double composite_score(double y, const CompositeTriplet& t,
                       const ScoreSpec& spec) {
  if (!(y > 0.0)) {
    throw domain_error("composite_score requires y > 0");
  }
  const double tau = spec.tau();
  const auto [s_minus, s_plus] = s_pair(y, t.v(), tau);

  // Generalized piecewise linear part with g(y) = c_tau * y.
  const double indicator = (y <= t.v()) ? 1.0 : 0.0;
  double loss = spec.g_scale() * (y - t.v()) * (tau - indicator);

  if (spec.phi_minus()) {
    const ScaledPhi p{*spec.phi_minus()};
    loss += bregman_block(p, t.e_minus(), -s_minus / tau, y);
  }
  if (spec.phi_plus()) {
    const ScaledPhi p{*spec.phi_plus()};
    loss += bregman_block(p, t.e_plus(), s_plus / (1.0 - tau), y);
  }
  if (spec.phi()) {
    const ScaledPhi p{*spec.phi()};
    const double m = tau * t.e_minus() + (1.0 - tau) * t.e_plus();
    loss += bregman_block(p, m, y, y);
  }
  return loss;
}

std::tuple<double, double, double> composite_score_gradient(
    double y, const CompositeTriplet& t, const ScoreSpec& spec) {
  if (!(y > 0.0)) {
    throw domain_error("composite_score_gradient requires y > 0");
  }
  const double tau = spec.tau();
  const auto [s_minus, s_plus] = s_pair(y, t.v(), tau);
  const double indicator = (y <= t.v()) ? 1.0 : 0.0;

  double de_minus = 0.0;
  double dv = (indicator - tau) * spec.g_scale();
  double de_plus = 0.0;

  if (spec.phi_minus()) {
    const ScaledPhi p{*spec.phi_minus()};
    de_minus += p.second(t.e_minus()) * (t.e_minus() + s_minus / tau);
    dv += p.deriv(t.e_minus()) * (indicator - tau) / tau;
  }
  if (spec.phi_plus()) {
    const ScaledPhi p{*spec.phi_plus()};
    de_plus += p.second(t.e_plus()) * (t.e_plus() - s_plus / (1.0 - tau));
    dv -= p.deriv(t.e_plus()) * (indicator - tau) / (1.0 - tau);
  }
  if (spec.phi()) {
    const ScaledPhi p{*spec.phi()};
    const double m = tau * t.e_minus() + (1.0 - tau) * t.e_plus();
    const double dm = p.second(m) * (m - y);
    de_minus += tau * dm;
    de_plus += (1.0 - tau) * dm;
  }
  return {de_minus, dv, de_plus};
}

}  // namespace dqr
