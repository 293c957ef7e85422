#include "dqr/identification.hpp"

namespace dqr {

std::array<double, 3> identification_V(double y, const CompositeTriplet& t,
                                       double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw domain_error("tau must lie in (0,1)");
  }
  const auto [s_minus, s_plus] = s_pair(y, t.v(), tau);
  const double indicator = (y <= t.v()) ? 1.0 : 0.0;
  return {t.e_minus() + s_minus / tau, indicator - tau,
          t.e_plus() - s_plus / (1.0 - tau)};
}

CalibrationReport calibration_report(const std::vector<CompositeTriplet>& predictions,
                                     const std::vector<double>& observations,
                                     double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw domain_error("tau must lie in (0,1)");
  }
  if (predictions.size() != observations.size() || predictions.empty()) {
    throw domain_error("predictions and observations must have equal nonzero length");
  }

  const std::size_t n = predictions.size();
  double covered = 0.0;
  double sum_minus = 0.0;
  double sum_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = observations[i];
    const CompositeTriplet& t = predictions[i];
    const double below = (y <= t.v()) ? 1.0 : 0.0;  // ties count as covered
    const double above = 1.0 - below;
    covered += below;
    sum_minus += t.e_minus() - (y / tau) * below + (t.v() / tau) * (below - tau);
    sum_plus += t.e_plus() - (y / (1.0 - tau)) * above -
                (t.v() / (1.0 - tau)) * ((1.0 - tau) - above);
  }

  CalibrationReport report;
  report.n = n;
  report.coverage = covered / static_cast<double>(n);
  report.v_minus = sum_minus / static_cast<double>(n);
  report.v_plus = sum_plus / static_cast<double>(n);
  return report;
}

}  // namespace dqr
