#pragma once

// Shared numerical kernels: compensated summation, adaptive Gauss-Kronrod
// quadrature, Brent root bracketing/solving, monotone cubic interpolation,
// and a small Nelder-Mead simplex minimizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heavytail::num {

struct IntegrationError : std::runtime_error {
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

struct BracketError : std::runtime_error {
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule (QUADPACK constants).
inline constexpr double gk15_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk15_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk15_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

}  // namespace detail

struct GkEstimate {
  double value;
  double error;
};

template <class F>
GkEstimate gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = detail::gk15_wk[7] * fc;
  double gauss = detail::gk15_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * detail::gk15_x[i];
    const double fsum = f(c - dx) + f(c + dx);
    kronrod += detail::gk15_wk[i] * fsum;
    if (i % 2 == 1) gauss += detail::gk15_wg[i / 2] * fsum;
  }
  const double value = kronrod * h;
  const double error = std::abs((kronrod - gauss) * h);
  return {value, error};
}

// Adaptive bisection over a list of seed intervals; refines the interval with
// the largest error estimate until the total satisfies the tolerance.
template <class F>
double integrate_adaptive(F&& f, std::span<const double> edges, double abs_tol, double rel_tol,
                          std::size_t max_intervals = 20000) {
  if (edges.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least 2 edges");
  struct Interval {
    double a, b, value, error;
  };
  std::vector<Interval> work;
  work.reserve(edges.size() + 64);
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto est = gk15(f, edges[i], edges[i + 1]);
    work.push_back({edges[i], edges[i + 1], est.value, est.error});
    total += est.value;
    total_err += est.error;
  }
  auto tol = [&]() { return std::max(abs_tol, rel_tol * std::abs(total)); };
  while (total_err > tol()) {
    if (work.size() >= max_intervals)
      throw IntegrationError("integration failure: interval budget exhausted (err=" +
                             std::to_string(total_err) + ")");
    std::size_t worst = 0;
    for (std::size_t i = 1; i < work.size(); ++i)
      if (work[i].error > work[worst].error) worst = i;
    const Interval iv = work[worst];
    if (iv.b - iv.a <= std::abs(iv.a) * 1e-15 + 1e-300) {
      // Interval at floating-point resolution; accept its estimate as-is.
      total_err -= iv.error;
      work[worst].error = 0.0;
      continue;
    }
    const double m = 0.5 * (iv.a + iv.b);
    const auto left = gk15(f, iv.a, m);
    const auto right = gk15(f, m, iv.b);
    total += left.value + right.value - iv.value;
    total_err += left.error + right.error - iv.error;
    work[worst] = {iv.a, m, left.value, left.error};
    work.push_back({m, iv.b, right.value, right.error});
  }
  KahanSum sum;
  for (const auto& iv : work) sum.add(iv.value);
  return sum.value();
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                          std::size_t max_intervals = 20000) {
  const double edges[2] = {a, b};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(edges, 2), abs_tol,
                            rel_tol, max_intervals);
}

// Brent-Dekker root finder on a sign-changing bracket. Stops on the x
// tolerance or, when ftol > 0, as soon as |f| drops below ftol.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb, double xtol,
                  int max_iter = 200, double ftol = 0.0) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw BracketError("brent_root: no sign change on bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b, b = c, c = a;
      fa = fb, fb = fc, fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (ftol > 0.0 && std::abs(fb) <= ftol) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes). Evaluation
// clamps to the node range.
class PchipInterpolant {
 public:
  PchipInterpolant() = default;

  PchipInterpolant(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("pchip: need >= 2 nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("pchip: x must be strictly increasing");
    d_.resize(n);
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = s[0];
    } else {
      d_[0] = endpoint_slope(h[0], h[1], s[0], s[1]);
      d_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
          d_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
      }
    }
  }

  double operator()(double q) const {
    const std::size_t n = x_.size();
    if (q <= x_.front()) return y_.front();
    if (q >= x_.back()) return y_.back();
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), q) - x_.begin() - 1;
    if (i >= n - 1) i = n - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (q - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  static double endpoint_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0)
      d = 0.0;
    else if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0))
      d = 3.0 * s0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Plain Nelder-Mead with adaptive shrink; good enough for the low-dimensional
// fitting problems in this library.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> start, double step, double ftol,
                             int max_iter = 2000) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  NelderMeadResult result;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= ftol * (std::abs(fv[best]) + ftol)) {
      result.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    }
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
      return p;
    };
    auto reflected = blend(-1.0);
    const double fr = f(reflected);
    if (fr < fv[best]) {
      auto expanded = blend(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = std::move(expanded);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(reflected);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(reflected);
      fv[worst] = fr;
    } else {
      auto contracted = blend(fr < fv[worst] ? -0.5 : 0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(contracted);
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  result.x = pts[best];
  result.fval = fv[best];
  result.iterations = iter;
  return result;
}

}  // namespace heavytail::num
