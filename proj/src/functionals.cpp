#include "dqr/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dqr/distributions.hpp"

namespace dqr {

namespace {

void check_sample(const std::vector<double>& sample) {
  if (sample.empty()) {
    throw domain_error("sample must be nonempty");
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw domain_error("tau must lie in (0,1)");
  }
}

// Index k (1-based) of the order statistic with (k-1)/n < tau*n <= k/n, plus
// whether tau*n is an integer. tau*n is snapped to the nearest integer within
// 1e-9 so that decimal levels like 0.9 * 10 behave as the exact rational.
struct TauSplit {
  std::size_t k;
  bool on_boundary;
};

TauSplit tau_split(double tau, std::size_t n) {
  const double m = tau * static_cast<double>(n);
  const double r = std::round(m);
  if (std::fabs(m - r) < 1e-9 && r >= 1.0) {
    return {static_cast<std::size_t>(r), true};
  }
  return {static_cast<std::size_t>(std::ceil(m)), false};
}

}  // namespace

QuantileSet empirical_quantile_set(const std::vector<double>& sample, double tau) {
  check_sample(sample);
  check_tau(tau);
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  const auto [k, boundary] = tau_split(tau, sorted.size());
  QuantileSet qs;
  qs.lower = sorted[k - 1];
  qs.upper = (boundary && k < sorted.size()) ? sorted[k] : sorted[k - 1];
  return qs;
}

std::pair<double, double> empirical_es(const std::vector<double>& sample, double tau) {
  check_sample(sample);
  check_tau(tau);
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto [k, boundary] = tau_split(tau, n);
  (void)boundary;

  // Integrate F_n^{-1} over (0, tau] and (tau, 1): full weight 1/n on order
  // statistics clear of tau, fractional weight on the straddling one.
  double lower_int = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) lower_int += sorted[i];
  lower_int /= static_cast<double>(n);
  lower_int += (tau - static_cast<double>(k - 1) / n) * sorted[k - 1];

  double upper_int = 0.0;
  for (std::size_t i = k; i < n; ++i) upper_int += sorted[i];
  upper_int /= static_cast<double>(n);
  upper_int += (static_cast<double>(k) / n - tau) * sorted[k - 1];

  return {lower_int / tau, upper_int / (1.0 - tau)};
}

std::pair<double, double> es_via_minimization(const std::vector<double>& sample,
                                              double tau, const GridSpec& grid) {
  check_sample(sample);
  check_tau(tau);
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  if (!(grid.step > 0.0)) {
    throw domain_error("grid step must be > 0");
  }
  if (grid.lo > *mn || grid.hi < *mx) {
    throw domain_error("grid must cover the sample range");
  }

  std::vector<double> candidates;
  candidates.reserve(
      static_cast<std::size_t>((grid.hi - grid.lo) / grid.step) + sample.size() + 2);
  for (double v = grid.lo; v <= grid.hi + 0.5 * grid.step; v += grid.step) {
    candidates.push_back(std::min(v, grid.hi));
  }
  candidates.insert(candidates.end(), sample.begin(), sample.end());

  double best_minus = std::numeric_limits<double>::infinity();
  double best_plus = std::numeric_limits<double>::infinity();
  for (double v : candidates) {
    double sum_minus = 0.0;
    double sum_plus = 0.0;
    for (double y : sample) {
      const auto [sm, sp] = s_pair(y, v, tau);
      sum_minus += sm;
      sum_plus += sp;
    }
    best_minus = std::min(best_minus, sum_minus / sample.size());
    best_plus = std::min(best_plus, sum_plus / sample.size());
  }
  return {-best_minus / tau, best_plus / (1.0 - tau)};
}

CompositeTriplet gamma_triplet(const GammaParams& p, double tau) {
  if (!(p.mu > 0.0) || !(p.gamma_shape > 0.0)) {
    throw domain_error("gamma_triplet requires mu > 0 and gamma_shape > 0");
  }
  check_tau(tau);
  const double v = gamma_quantile(tau, p.gamma_shape, p.mu);
  // CDF with shape bumped to gamma+1 and the scale mu/gamma unchanged, i.e.
  // mean argument (gamma+1)/gamma * mu in the mean parameterization.
  const double scale = p.mu / p.gamma_shape;
  const double f_up = gamma_lower_regularized(p.gamma_shape + 1.0, v / scale);
  const double e_minus = p.mu * f_up / tau;
  const double e_plus = p.mu * (1.0 - f_up) / (1.0 - tau);
  return CompositeTriplet(e_minus, v, e_plus);
}

}  // namespace dqr
