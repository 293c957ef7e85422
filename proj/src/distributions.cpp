#include "dqr/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dqr {

namespace {

// Series representation of P(a, x), valid (and fast) for x < a + 1.
double gammp_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), x >= a + 1.
double gammq_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_lower_regularized(double shape, double x) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("gamma shape must be > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x < shape + 1.0) return gammp_series(shape, x);
  return 1.0 - gammq_cf(shape, x);
}

double gamma_cdf(double y, double gamma_shape, double mu) {
  if (!(mu > 0.0) || !(gamma_shape > 0.0)) {
    throw std::invalid_argument("gamma_cdf requires mu > 0 and shape > 0");
  }
  const double scale = mu / gamma_shape;
  return gamma_lower_regularized(gamma_shape, y / scale);
}

double gamma_quantile(double p, double gamma_shape, double mu) {
  if (!(mu > 0.0) || !(gamma_shape > 0.0)) {
    throw std::invalid_argument("gamma_quantile requires mu > 0 and shape > 0");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("gamma_quantile requires p in (0,1)");
  }
  const double scale = mu / gamma_shape;

  // Wilson-Hilferty starting point, then expand to a bracket.
  const double z = normal_quantile(p);
  const double g = gamma_shape;
  double x = g * std::pow(1.0 - 1.0 / (9.0 * g) + z / (3.0 * std::sqrt(g)), 3.0);
  if (!(x > 0.0) || !std::isfinite(x)) x = g;

  double lo = x, hi = x;
  while (gamma_lower_regularized(g, lo) > p && lo > 1e-300) lo *= 0.5;
  while (gamma_lower_regularized(g, hi) < p && hi < 1e300) hi *= 2.0;

  // Newton on F(x) - p with bisection safeguard.
  x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_lower_regularized(g, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::fabs(f) < 1e-12 && (hi - lo) < 1e-12 * (1.0 + x)) break;
    const double log_pdf = (g - 1.0) * std::log(x) - x - std::lgamma(g);
    const double pdf = std::exp(log_pdf);
    double next = x - f / pdf;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  return x * scale;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile requires p in (0,1)");
  }
  // Wichura (1988), algorithm AS 241, PPND16.
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

}  // namespace dqr
