#pragma once

// Scalar distribution helpers: normal and chi-square quantiles and the two
// empirical quantile conventions used in this library.
//
// The normal quantile is Wichura's AS 241 (PPND16) rational approximation,
// accurate to well below 1e-9 over (0,1).  The chi-square quantile inverts
// the regularized incomplete gamma with a Wilson-Hilferty start and Newton
// polish; both are pinned against tabulated values in the test suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "svarsets/common.hpp"

namespace svarsets {

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw config_error("normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

namespace detail {

// Regularized lower incomplete gamma P(a, x), series/continued-fraction split.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw config_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

inline double chi2_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return detail::gamma_p(0.5 * df, 0.5 * x);
}

inline double chi2_quantile(double p, double df) {
  if (!(p >= 0.0 && p < 1.0)) throw config_error("chi2_quantile: p must lie in [0,1)");
  if (df <= 0.0) throw config_error("chi2_quantile: df must be positive");
  if (p == 0.0) return 0.0;
  // Wilson-Hilferty start, then Newton on the cdf
  const double z = normal_quantile(p);
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  double x = df * t * t * t;
  if (x <= 0.0) x = 1e-8;
  for (int it = 0; it < 60; ++it) {
    const double f = chi2_cdf(x, df) - p;
    const double dens = std::exp((0.5 * df - 1.0) * std::log(x) - 0.5 * x -
                                 std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0));
    if (dens <= 0.0) break;
    const double step = f / dens;
    x -= step;
    if (x <= 0.0) x = 1e-12;
    if (std::abs(step) < 1e-12 * (1.0 + x)) break;
  }
  return x;
}

// Smallest draw whose rank reaches ceil(level * n); the conservative
// convention used for simulated critical values.  Input must be sorted.
inline double quantile_higher(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw config_error("quantile_higher: empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw config_error("quantile_higher: bad level");
  const std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

// Linear-interpolation quantile (continuous, endpoints at min/max).
inline double quantile_interpolated(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw config_error("quantile_interpolated: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw config_error("quantile_interpolated: bad level");
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace svarsets
