#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "rmem/errors.hpp"

namespace rmem {

/// Gauss-Legendre rule on [-1, 1]. Nodes are computed by Newton iteration on
/// the Legendre polynomial, which is accurate to machine precision for the
/// small orders used here. Rules are cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline const GaussRule& gauss_legendre(int n) {
  static thread_local std::vector<GaussRule> cache;
  if (n < 1) fail(errc::invalid_argument, "gauss_legendre order must be >= 1");
  if (cache.size() <= static_cast<std::size_t>(n)) cache.resize(n + 1);
  GaussRule& rule = cache[n];
  if (!rule.nodes.empty()) return rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n and P_n' by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Integrate f over [a, b] with a single n-point Gauss-Legendre panel.
template <class F>
double gauss_panel(F&& f, double a, double b, int n = 16) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

/// Neville polynomial interpolation through (xs, ys), evaluated at x.
/// Used mostly with geometric node ladders to extrapolate boundary limits
/// at x = 0. Returns the value and the magnitude of the last correction as
/// a crude error indicator.
inline std::pair<double, double> neville(const std::vector<double>& xs,
                                         const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n == 0) fail(errc::invalid_argument, "neville needs at least one node");
  std::vector<double> t = ys;
  double last = t[0];
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double denom = xs[i] - xs[i + level];
      t[i] = ((x - xs[i + level]) * t[i] - (x - xs[i]) * t[i + 1]) / denom;
    }
    last = t[0];
  }
  double err = (n > 1) ? std::abs(last - ys[0]) : 0.0;
  if (n > 2) {
    // Redo the final level against the one-shorter table for the estimate.
    std::vector<double> s(ys.begin(), ys.end() - 1);
    std::vector<double> xr(xs.begin(), xs.end() - 1);
    std::vector<double> u = s;
    for (std::size_t level = 1; level < xr.size(); ++level)
      for (std::size_t i = 0; i + level < xr.size(); ++i) {
        const double denom = xr[i] - xr[i + level];
        u[i] = ((x - xr[i + level]) * u[i] - (x - xr[i]) * u[i + 1]) / denom;
      }
    err = std::abs(last - u[0]);
  }
  return {last, err};
}

inline double neville_at_zero(const std::vector<double>& xs, const std::vector<double>& ys) {
  return neville(xs, ys, 0.0).first;
}

struct BrentResult {
  double root = 0.0;
  double f_root = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Brent's method on [a, b] with f(a) f(b) <= 0. Stops when the bracket
/// width falls below xtol + rtol*|x|.
template <class F>
BrentResult brent(F&& f, double a, double b, double fa, double fb, double xtol = 0.0,
                  double rtol = 1e-14, int max_iter = 200) {
  BrentResult res;
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if ((fa > 0) == (fb > 0)) fail(errc::lost_bracket, "brent: endpoints have equal signs");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * (xtol + rtol * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      res.root = b;
      res.f_root = fb;
      res.iterations = it;
      res.converged = true;
      return res;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, falling back to secant.
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  res.root = b;
  res.f_root = fb;
  res.iterations = max_iter;
  res.converged = false;
  return res;
}

template <class F>
BrentResult brent(F&& f, double a, double b, double xtol = 0.0, double rtol = 1e-14,
                  int max_iter = 200) {
  return brent(f, a, b, f(a), f(b), xtol, rtol, max_iter);
}

}  // namespace rmem
