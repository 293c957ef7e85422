#pragma once

#include <utility>
#include <vector>

#include "dqr/scores.hpp"

namespace dqr {

/// The set {t : F_n(t-) <= tau <= F_n(t)} of empirical tau-quantiles.
/// A closed interval; lower is the left-continuous generalized inverse.
struct QuantileSet {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double t, double tol = 0.0) const {
    return t >= lower - tol && t <= upper + tol;
  }
};

/// Gamma distribution parameterized by mean mu > 0 and shape gamma > 0
/// (scale = mu / gamma_shape).
struct GammaParams {
  double mu = 1.0;
  double gamma_shape = 1.0;
};

/// Uniform candidate grid [lo, hi] with spacing `step`.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.01;
};

QuantileSet empirical_quantile_set(const std::vector<double>& sample, double tau);

/// (ES-_tau, ES+_tau) of the empirical distribution, computed exactly from
/// order statistics with fractional weight on the straddling one:
///   ES- = (1/tau) int_0^tau F_n^{-1},  ES+ = (1/(1-tau)) int_tau^1 F_n^{-1}.
std::pair<double, double> empirical_es(const std::vector<double>& sample, double tau);

/// Independent oracle for empirical_es: brute-force minimization of the mean
/// S-_tau / S+_tau over v, returning
///   (-(1/tau) min_v mean S-(Y_i; v), (1/(1-tau)) min_v mean S+(Y_i; v)).
/// Candidates are the grid points plus the sample values themselves (the
/// kinks of the piecewise linear objectives). The grid must cover the sample
/// range.
std::pair<double, double> es_via_minimization(const std::vector<double>& sample,
                                              double tau, const GridSpec& grid);

/// Closed-form composite triplet of the gamma model:
///   v  = F^{-1}(tau),
///   e- = mu * F_{shape+1}(v) / tau,
///   e+ = mu * (1 - F_{shape+1}(v)) / (1 - tau),
/// where F_{shape+1} is the gamma CDF with shape gamma+1 and the scale
/// unchanged at mu/gamma (the reading under which these equal the true
/// conditional tail expectations).
CompositeTriplet gamma_triplet(const GammaParams& p, double tau);

}  // namespace dqr
