#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "rmem/errors.hpp"

namespace rmem {

/// Dormand-Prince 5(4) with the classic quartic dense-output interpolant.
/// The integrator is deliberately small: fixed state dimension, FSAL,
/// an elementary I step-size controller, and step clipping so that event
/// locations and requested stop points become genuine accepted states
/// rather than interpolated ones. Quantities extracted at accepted states
/// carry flow-consistent errors, which matters for the boundary limits
/// taken elsewhere in this library.
template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;
  using RhsFn = std::function<State(double, const State&)>;

  struct DenseStep {
    double x0 = 0.0;
    double h = 0.0;
    std::array<double, N> r1{}, r2{}, r3{}, r4{}, r5{};

    State eval(double x) const {
      const double th = (x - x0) / h;
      const double th1 = 1.0 - th;
      State y;
      for (std::size_t i = 0; i < N; ++i)
        y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
      return y;
    }
  };

  enum class Stop { ReachedEnd, Event, Predicate, MaxSteps, StepFailure, NonFinite };

  struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    // Local error budget per step, as a fraction of the tolerances, so that
    // the accumulated error over an O(1) integration span stays near the
    // requested tolerance.
    double step_budget = 0.02;
    double h_init = 0.0;            // 0 -> automatic
    double h_max = 0.0;             // 0 -> |x_end - x0|
    double fixed_h = 0.0;           // > 0 disables adaptivity (no dense clip on events)
    std::size_t max_steps = 2'000'000;
    // Landing levels for one designated scalar component. Whenever that
    // component crosses a level inside a step, the step is re-taken so
    // that it ends on the crossing. Levels flagged terminal end the run.
    int level_component = -1;
    std::vector<double> levels;
    std::vector<bool> level_terminal;
    // Checked after every accepted step; returning true stops the run.
    std::function<bool(double, const State&)> stop_predicate;
  };

  struct Crossing {
    std::size_t level_index = 0;
    std::size_t node_index = 0;  // index into xs/ys of the landing node
    double x = 0.0;
  };

  struct Solution {
    std::vector<double> xs;
    std::vector<State> ys;
    std::vector<DenseStep> steps;
    std::vector<Crossing> crossings;
    Stop stop = Stop::ReachedEnd;
    int terminal_level = -1;
    double x_end = 0.0;
    State y_end{};
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;

    State at(double x) const {
      if (steps.empty()) return y_end;
      // Binary search for the step containing x (steps ordered in x0).
      const bool fwd = steps.front().h > 0;
      std::size_t lo = 0, hi = steps.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        const bool before = fwd ? (steps[mid].x0 <= x) : (steps[mid].x0 >= x);
        if (before) lo = mid; else hi = mid - 1;
      }
      return steps[lo].eval(x);
    }
  };

  Dopri5(RhsFn rhs, Options opts) : f_(std::move(rhs)), opt_(std::move(opts)) {}

  Solution integrate(double x0, const State& y0, double x_end) {
    Solution sol;
    const double dir = (x_end >= x0) ? 1.0 : -1.0;
    const double span = std::abs(x_end - x0);
    const double h_max = (opt_.h_max > 0) ? opt_.h_max : span;
    double x = x0;
    State y = y0;
    State k1 = f_(x, y);
    if (!finite(y) || !finite(k1)) {
      sol.stop = Stop::NonFinite;
      sol.x_end = x;
      sol.y_end = y;
      return sol;
    }
    double h = (opt_.fixed_h > 0) ? opt_.fixed_h : (opt_.h_init > 0 ? opt_.h_init : initial_h(x, y, k1, dir, h_max));
    h = std::min(h, h_max);

    sol.xs.push_back(x);
    sol.ys.push_back(y);

    std::size_t steps_taken = 0;
    int skip_level = -1;  // level just landed on; excluded from the next detection
    while (dir * (x_end - x) > 0) {
      if (++steps_taken > opt_.max_steps) {
        sol.stop = Stop::MaxSteps;
        break;
      }
      bool last = false;
      if (dir * (x + dir * h - x_end) >= 0) {
        h = std::abs(x_end - x);
        last = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(x))) {
        sol.stop = Stop::StepFailure;
        break;
      }

      State ynew, k7, err_vec;
      std::array<State, 7> k;
      take_step(x, y, k1, dir * h, ynew, k7, k, err_vec);
      double err = error_norm(y, ynew, err_vec);
      if (!std::isfinite(err)) {
        if (opt_.fixed_h > 0) {
          sol.stop = Stop::NonFinite;
          break;
        }
        ++sol.n_rejected;
        h *= 0.25;
        continue;
      }
      if (opt_.fixed_h <= 0 && err > 1.0) {
        ++sol.n_rejected;
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }

      // Level crossing: clip the step so it lands on the earliest crossing.
      int hit_level = -1;
      if (opt_.level_component >= 0 && opt_.fixed_h <= 0) {
        DenseStep ds = make_dense(x, dir * h, y, ynew, k);
        double x_cross = 0.0;
        hit_level = earliest_crossing(ds, y, ynew, x, x + dir * h, x_cross, skip_level);
        if (hit_level >= 0) {
          // Re-take a clipped step ending at the crossing, then polish the
          // landing with Newton corrections on the level residual. The loop
          // keeps the computed states consistent with the final width.
          double hc = std::max(std::abs(x_cross - x), 1e-14 * std::max(1.0, std::abs(x)));
          take_step(x, y, k1, dir * hc, ynew, k7, k, err_vec);
          for (int pass = 0; pass < 3; ++pass) {
            const double g = ynew[opt_.level_component] - opt_.levels[hit_level];
            const double gp = k7[opt_.level_component] * dir;
            if (std::abs(gp) < 1e-300) break;
            const double dh = -g / gp;
            if (std::abs(dh) < 1e-15 * std::max(1.0, hc)) break;
            hc = std::max(1e-14 * std::max(1.0, std::abs(x)), hc + dh);
            take_step(x, y, k1, dir * hc, ynew, k7, k, err_vec);
          }
          h = hc;
          last = false;
        }
      }

      sol.steps.push_back(make_dense(x, dir * h, y, ynew, k));
      x += dir * h;
      y = ynew;
      k1 = k7;  // FSAL
      ++sol.n_accepted;
      sol.xs.push_back(x);
      sol.ys.push_back(y);

      if (hit_level >= 0) {
        sol.crossings.push_back({static_cast<std::size_t>(hit_level), sol.xs.size() - 1, x});
        if (opt_.level_terminal[hit_level]) {
          sol.terminal_level = hit_level;
          sol.stop = Stop::Event;
          break;
        }
        skip_level = hit_level;
        // Restart step size conservatively after a clipped landing.
        h = std::max(h, 1e-6 * std::max(1.0, std::abs(x)));
        if (opt_.fixed_h <= 0) {
          double err_clip = std::max(err, 1e-10);
          h *= std::clamp(0.9 * std::pow(err_clip, -0.2), 0.2, 5.0);
        }
      } else {
        skip_level = -1;
        if (opt_.fixed_h <= 0) {
          double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
          h = std::min(h * fac, h_max);
        }
      }

      if (opt_.stop_predicate && opt_.stop_predicate(x, y)) {
        sol.stop = Stop::Predicate;
        break;
      }
      if (hit_level < 0 && last) {
        sol.stop = Stop::ReachedEnd;
        break;
      }
    }

    if (sol.xs.empty()) {
      sol.xs.push_back(x0);
      sol.ys.push_back(y0);
    }
    sol.x_end = sol.xs.back();
    sol.y_end = sol.ys.back();
    return sol;
  }

 private:
  RhsFn f_;
  Options opt_;

  static bool finite(const State& y) {
    for (double v : y)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double error_norm(const State& y0, const State& y1, const State& e) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt_.step_budget *
                        (opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i])));
      const double q = e[i] / sc;
      acc += q * q;
    }
    return std::sqrt(acc / N);
  }

  double initial_h(double x, const State& y, const State& k1, double dir, double h_max) const {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    double h = (d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6;
    if (h <= 0 || !std::isfinite(h)) h = 1e-6;
    (void)x;
    (void)dir;
    return std::min(std::max(h, 1e-12), h_max);
  }

  void take_step(double x, const State& y, const State& k1, double h, State& ynew, State& k7,
                 std::array<State, 7>& k, State& err_vec) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    State t;
    k[0] = k1;
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * a21 * k[0][i];
    k[1] = f_(x + c2 * h, t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    k[2] = f_(x + c3 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    k[3] = f_(x + c4 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    k[4] = f_(x + c5 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                         a65 * k[4][i]);
    k[5] = f_(x + h, t);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                            a76 * k[5][i]);
    k[6] = f_(x + h, ynew);
    k7 = k[6];
    for (std::size_t i = 0; i < N; ++i)
      err_vec[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                        e6 * k[5][i] + e7 * k[6][i]);
  }

  DenseStep make_dense(double x, double h, const State& y, const State& ynew,
                       const std::array<State, 7>& k) const {
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
    DenseStep ds;
    ds.x0 = x;
    ds.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k[0][i] - ydiff;
      ds.r1[i] = y[i];
      ds.r2[i] = ydiff;
      ds.r3[i] = bspl;
      ds.r4[i] = ydiff - h * k[6][i] - bspl;
      ds.r5[i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                      d6 * k[5][i] + d7 * k[6][i]);
    }
    return ds;
  }

  /// Earliest level crossing of the monitored component inside (x_lo, x_hi],
  /// located on the dense interpolant by bisection. Returns the level index
  /// or -1.
  int earliest_crossing(const DenseStep& ds, const State& y0, const State& y1, double x_lo,
                        double x_hi, double& x_cross, int skip_level) const {
    const int comp = opt_.level_component;
    const double v0 = y0[comp], v1 = y1[comp];
    int best = -1;
    double best_x = x_hi;
    const double dir = (x_hi >= x_lo) ? 1.0 : -1.0;
    for (std::size_t li = 0; li < opt_.levels.size(); ++li) {
      if (static_cast<int>(li) == skip_level) continue;
      const double lvl = opt_.levels[li];
      const double g0 = v0 - lvl, g1 = v1 - lvl;
      if (g0 == 0.0) continue;  // already on the level at step start
      if ((g0 > 0) == (g1 > 0) && g1 != 0.0) continue;
      double lo = x_lo, hi = x_hi, glo = g0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = ds.eval(mid)[comp] - lvl;
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
        if (std::abs(hi - lo) < 1e-15 * std::max(1.0, std::abs(hi))) break;
      }
      const double xc = 0.5 * (lo + hi);
      if (dir * (xc - best_x) < 0 || best < 0) {
        best = static_cast<int>(li);
        best_x = xc;
      }
    }
    x_cross = best_x;
    return best;
  }
};

}  // namespace rmem
