#pragma once

namespace dqr {

/// Regularized lower incomplete gamma function P(shape, x).
/// Series expansion for x < shape + 1, Lentz continued fraction otherwise.
double gamma_lower_regularized(double shape, double x);

/// CDF of the gamma distribution parameterized by mean mu and shape gamma
/// (scale = mu / gamma).
double gamma_cdf(double y, double gamma_shape, double mu);

/// Inverse CDF of the same parameterization, by bracketed Newton iteration
/// with bisection fallback, to 1e-12 on the probability scale.
double gamma_quantile(double p, double gamma_shape, double mu);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241 rational approximation).
double normal_quantile(double p);

}  // namespace dqr
