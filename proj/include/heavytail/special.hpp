#pragma once

// Regularized incomplete gamma functions and their inverse. Series expansion
// below the a+1 crossover, Lentz continued fraction above; the inverse is a
// bracketed Newton iteration on log scale.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace heavytail::special {

namespace detail {

inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_contfrac(a, x);
}

// Inverse of Q(a, .): returns x with gamma_q(a, x) = q. Newton iteration on
// t = log x with a bisection safeguard; log scale keeps the small-a, q near 1
// corner (x astronomically small) well conditioned.
inline double inv_gamma_q(double a, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("inv_gamma_q: q outside [0,1]");
  if (q >= 1.0) return 0.0;
  if (q <= 0.0) return std::numeric_limits<double>::infinity();

  double hi = std::max(a, 1.0);
  while (gamma_q(a, hi) > q) {
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  double t_hi = std::log(hi);  // Q(exp(t_hi)) <= q
  double t_lo = t_hi;
  double step = 2.0;
  while (gamma_q(a, std::exp(t_lo)) <= q) {
    t_hi = t_lo;
    t_lo -= step;
    step *= 2.0;
    if (t_lo < -745.0) {
      t_lo = -745.0;
      break;
    }
  }
  const double lg = std::lgamma(a);
  double t = 0.5 * (t_lo + t_hi);
  for (int iter = 0; iter < 120; ++iter) {
    const double x = std::exp(t);
    const double fx = gamma_q(a, x) - q;  // decreasing in t
    if (fx > 0.0)
      t_lo = t;
    else
      t_hi = t;
    if (std::abs(fx) <= 1e-12 * q || t_hi - t_lo < 1e-14) break;
    const double dfdt = x * std::exp(-x + (a - 1.0) * std::log(x) - lg);  // -f'(t)
    double next = dfdt > 0.0 ? t + fx / dfdt : 0.5 * (t_lo + t_hi);
    if (!(next > t_lo && next < t_hi)) next = 0.5 * (t_lo + t_hi);
    t = next;
  }
  return std::exp(t);
}

}  // namespace heavytail::special
