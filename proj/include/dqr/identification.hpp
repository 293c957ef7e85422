#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dqr/scores.hpp"

namespace dqr {

/// Out-of-sample calibration statistics for a composite-triplet model.
/// coverage is the empirical fraction of observations at or below the
/// predicted quantile; v_minus / v_plus are the mean joint identification
/// statistics for (ES-, q) and (ES+, q). Values close to 0 indicate a well
/// calibrated model; no formal threshold is attached.
struct CalibrationReport {
  double coverage = 0.0;
  double v_minus = 0.0;
  double v_plus = 0.0;
  std::size_t n = 0;
};

/// Strict identification function of the composite triplet:
///   ( e- + S-_tau(y;v)/tau,  1{y<=v} - tau,  e+ - S+_tau(y;v)/(1-tau) ).
/// Its expectation vanishes exactly at the true triplet.
std::array<double, 3> identification_V(double y, const CompositeTriplet& t, double tau);

/// Empirical calibration statistics over paired predictions/observations.
/// v_minus and v_plus are accumulated through the expanded empirical forms
///   e- - (y/tau) 1{y<=v} + (v/tau)(1{y<=v} - tau),
///   e+ - (y/(1-tau)) 1{y>v} - (v/(1-tau))((1-tau) - 1{y>v}),
/// which equal the means of identification_V components 1 and 3.
CalibrationReport calibration_report(const std::vector<CompositeTriplet>& predictions,
                                     const std::vector<double>& observations,
                                     double tau);

}  // namespace dqr
