#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rmem/errors.hpp"
#include "rmem/numerics.hpp"
#include "rmem/ode.hpp"
#include "rmem/params.hpp"

namespace rmem {

inline constexpr double kPi = 3.14159265358979323846;

/// Point on a generating curve: arc length from the pole, radial and
/// vertical coordinates, and the tangent angle against the positive r-axis.
struct ProfileState {
  double sigma = 0.0;
  double r = 0.0;
  double z = 0.0;
  double phi = 0.0;
};

/// Augmented profile point. Besides the curve state it carries
///   u = nu3 / z   (vertical normal component over height)
///   v = dH / dz   (height derivative of the mean curvature)
/// Both satisfy regular differential equations along the curve,
///   u' = -sin(phi) v,   v' = u (sin(phi) - phi' r) / r^2,
/// so the right-hand side stays finite as z -> 0 and the boundary limits of
/// phi' and phi'' are plain state values: phi'' -> -2 v at {z = 0}.
struct PointState {
  double sigma = 0.0;
  double r = 0.0;
  double z = 0.0;
  double phi = 0.0;
  double u = 0.0;
  double v = 0.0;

  ProfileState curve() const { return {sigma, r, z, phi}; }
};

enum class Termination { HitBoundary, SigmaMaxExceeded, AxisReturn, StepFailure };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::HitBoundary: return "HitBoundary";
    case Termination::SigmaMaxExceeded: return "SigmaMaxExceeded";
    case Termination::AxisReturn: return "AxisReturn";
    case Termination::StepFailure: return "StepFailure";
  }
  return "unknown";
}

/// Tangent-angle slope at the pole. Regularity of the generating curve at
/// r = 0 forces phi'(0) = -(1/z0 + c0).
inline double pole_phi_slope(double c0, double z0) {
  require(z0 != 0.0, errc::degenerate_initial_height, "z0 must be nonzero");
  return -(1.0 / z0 + c0);
}

/// Series start near the pole: r ~ sigma, z ~ z0 + phi'(0) sigma^2 / 2,
/// phi ~ phi'(0) sigma, plus the cubic corrections those force through the
/// system (r3 = -phi1^2/6, phi3 from the sigma^2 balance of the angle
/// equation). The auxiliary fields carry matching corrections so that the
/// invariants u z = cos(phi) and v z = phi' + u hold to O(sigma^4) at the
/// start; v is sensitive to the start through a 1/r^2 factor, which is why
/// the cubic terms are kept.
inline PointState series_point(double c0, double z0, double sigma) {
  const double p1 = pole_phi_slope(c0, z0);
  const double s2 = sigma * sigma;
  const double u2 = -(0.5 * p1 * p1 + 0.5 * p1 / z0) / z0;
  const double p3 = -0.5 * u2;
  const double v2 = p3 / z0 + 0.5 * c0 * p1 / (z0 * z0);
  PointState p;
  p.sigma = sigma;
  p.r = sigma * (1.0 - p1 * p1 * s2 / 6.0);
  p.z = z0 + 0.5 * p1 * s2 + 0.25 * (p3 - p1 * p1 * p1 / 6.0) * s2 * s2;
  p.phi = sigma * (p1 + p3 * s2);
  p.u = 1.0 / z0 + u2 * s2;
  p.v = -c0 / z0 + v2 * s2;
  return p;
}

inline ProfileState initial_state_series(const ModelParams& params, double z0) {
  params.validate();
  require(z0 != 0.0, errc::degenerate_initial_height, "initial height z0 must be nonzero");
  const double z0n = std::abs(z0);
  return series_point(params.c0, z0n, params.resolved_sigma0(z0n)).curve();
}

/// Right-hand side of the generating-curve system at an interior point:
/// (r', z', phi') = (cos phi, sin phi, -2 cos(phi)/z - sin(phi)/r - 2 c0).
inline std::array<double, 3> rhs(const ProfileState& s, double c0) {
  require(s.r > 0.0 && s.z > 0.0, errc::singular_evaluation,
          "rhs requires an interior point with r > 0 and z > 0");
  const double cphi = std::cos(s.phi), sphi = std::sin(s.phi);
  return {cphi, sphi, -2.0 * cphi / s.z - sphi / s.r - 2.0 * c0};
}

struct Curvatures {
  double H = 0.0;
  double K = 0.0;
  double nu3 = 0.0;
  double kappa_meridian = 0.0;
  double kappa_parallel = 0.0;
};

enum class PointKind { Interior, Pole, Boundary };

/// Principal curvature data under the convention nu3 = cos(phi),
/// 2H = phi' + sin(phi)/r, K = phi' sin(phi)/r. On a sphere of radius R
/// with outward normal this yields H = -1/R. Pole and boundary states use
/// the regular limits (umbilic pole; kappa_parallel = -1/r_b and
/// kappa_meridian = 2 c0 - 1/r_b on {z = 0}).
inline Curvatures curvatures_at(const ProfileState& s, double c0,
                                PointKind kind = PointKind::Interior) {
  Curvatures c;
  if (kind == PointKind::Pole) {
    require(s.z != 0.0, errc::singular_evaluation, "pole state needs z != 0");
    const double p1 = -(1.0 / s.z + c0);
    c.kappa_meridian = c.kappa_parallel = p1;
    c.H = p1;
    c.K = p1 * p1;
    c.nu3 = 1.0;
    return c;
  }
  if (kind == PointKind::Boundary) {
    require(s.r > 0.0, errc::singular_evaluation, "boundary state needs r > 0");
    c.kappa_parallel = -1.0 / s.r;
    c.kappa_meridian = 2.0 * c0 - 1.0 / s.r;
    c.H = c0 - 1.0 / s.r;
    c.K = c.kappa_meridian * c.kappa_parallel;
    c.nu3 = 0.0;
    return c;
  }
  require(s.r > 0.0 && s.z > 0.0, errc::singular_evaluation,
          "interior curvature evaluation needs r > 0 and z > 0");
  const auto d = rhs(s, c0);
  c.kappa_meridian = d[2];
  c.kappa_parallel = std::sin(s.phi) / s.r;
  c.H = 0.5 * (c.kappa_meridian + c.kappa_parallel);
  c.K = c.kappa_meridian * c.kappa_parallel;
  c.nu3 = std::cos(s.phi);
  return c;
}

/// Curvatures from an augmented point; uses phi' = -2u - sin(phi)/r - 2 c0,
/// which remains well conditioned down to the boundary.
inline Curvatures curvatures_at(const PointState& p, double c0) {
  Curvatures c;
  const double sphi = std::sin(p.phi);
  c.kappa_meridian = -2.0 * p.u - sphi / p.r - 2.0 * c0;
  c.kappa_parallel = sphi / p.r;
  c.H = -p.u - c0;
  c.K = c.kappa_meridian * c.kappa_parallel;
  c.nu3 = std::cos(p.phi);
  return c;
}

struct BoundaryTrace {
  double sigma_b = 0.0;
  double r_b = 0.0;
  double phi_b = 0.0;
  double dphi_b = 0.0;
  double d2phi_b = 0.0;
  double dH_dn = 0.0;
};

/// Densely sampled generating curve together with its boundary trace.
class ProfileSolution {
 public:
  using Ode = Dopri5<5>;  // state (r, z, phi, u, v), independent variable sigma
  using OdeZ = Dopri5<5>; // state (sigma, r, phi, u, v), independent variable z

  ModelParams params;
  double c0 = 0.0;
  double z0 = 0.0;          // stored after z -> -z normalization, so z0 > 0
  bool flipped = false;     // input height was negative
  double sigma0 = 0.0;      // resolved pole offset
  double sigma_max = 0.0;   // resolved arc-length cap
  double z_cut = 0.0;       // switch height z_cutoff_factor * z0
  Termination termination = Termination::StepFailure;

  Ode::Solution stage_a;    // sigma-parametrized run from sigma0 to the switch
  OdeZ::Solution stage_b;   // z-parametrized run from z_cut toward z = 0
  std::vector<double> ladder_z;          // dyadic landing heights (descending)
  std::vector<std::ptrdiff_t> ladder_node;  // stage-a node index per height, -1 if absent

  double sigma_b = 0.0;
  double r_b = 0.0;
  double phi_b = 0.0;
  double dphi_b = 0.0;
  double d2phi_b = 0.0;
  double u_b = 0.0;
  double v_b = 0.0;
  double r_b_error_estimate = 0.0;

  bool hit_boundary() const { return termination == Termination::HitBoundary; }

  double sigma_switch() const { return stage_a.x_end; }

  static PointState to_point(double sigma, const Ode::State& y) {
    return {sigma, y[0], y[1], y[2], y[3], y[4]};
  }
  static PointState to_point_z(double z, const OdeZ::State& y) {
    return {y[0], y[1], z, y[2], y[3], y[4]};
  }

  PointState pole_state() const { return {0.0, 0.0, z0, 0.0, 1.0 / z0, -c0 / z0}; }

  /// State at arc length sigma in [0, sigma_b].
  PointState state_at(double sigma) const {
    if (sigma <= 0.0) return pole_state();
    if (sigma < sigma0) return series_point(c0, z0, sigma);
    if (sigma <= sigma_switch() || !hit_boundary()) {
      const auto y = stage_a.at(std::min(sigma, stage_a.x_end));
      return to_point(sigma, y);
    }
    if (sigma >= sigma_b) return boundary_state();
    // Invert sigma(z) on the z-parametrized tail (z and sigma are monotone).
    double lo = stage_b.x_end, hi = z_cut;  // z range, ascending
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double smid = stage_b.at(mid)[0];
      if (smid > sigma) lo = mid; else hi = mid;
      if (hi - lo < 1e-16 * z_cut) break;
    }
    const double zq = 0.5 * (lo + hi);
    return to_point_z(zq, stage_b.at(zq));
  }

  PointState boundary_state() const {
    return {sigma_b, r_b, 0.0, phi_b, u_b, v_b};
  }

  /// Merged sample rows (pole, stage a nodes, stage b nodes, boundary).
  std::vector<PointState> samples() const {
    std::vector<PointState> out;
    out.reserve(stage_a.xs.size() + stage_b.xs.size() + 2);
    out.push_back(pole_state());
    for (std::size_t i = 0; i < stage_a.xs.size(); ++i)
      out.push_back(to_point(stage_a.xs[i], stage_a.ys[i]));
    if (hit_boundary()) {
      for (std::size_t i = 1; i < stage_b.xs.size(); ++i)
        out.push_back(to_point_z(stage_b.xs[i], stage_b.ys[i]));
      out.push_back(boundary_state());
    }
    return out;
  }
};

namespace detail {

inline ProfileSolution::Ode::State sigma_rhs(double c0, const ProfileSolution::Ode::State& y) {
  const double r = y[0], phi = y[2], u = y[3], v = y[4];
  if (r <= 0.0) {
    return {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0, 0};
  }
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double phip = -2.0 * u - sphi / r - 2.0 * c0;
  return {cphi, sphi, phip, -sphi * v, u * (sphi - phip * r) / (r * r)};
}

inline ProfileSolution::OdeZ::State z_rhs(double c0, double /*z*/,
                                          const ProfileSolution::OdeZ::State& y) {
  const double r = y[1], phi = y[2], u = y[3], v = y[4];
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  if (r <= 0.0 || sphi >= 0.0) {
    return {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0, 0};
  }
  const double phip = -2.0 * u - sphi / r - 2.0 * c0;
  const double inv = 1.0 / sphi;
  return {inv, cphi * inv, phip * inv, -v, u * (sphi - phip * r) / (r * r) * inv};
}

}  // namespace detail

/// Integrate the generating-curve system from the pole to the plane {z = 0}.
///
/// Stage a runs in arc length from the series start down to the switch
/// height z_cutoff_factor * z0, landing exactly on the dyadic heights
/// z0 / 2^j on the way (those nodes later serve as counterterm ladder and
/// quadrature break points). Stage b switches the independent variable to z
/// and continues to z_cut / 2^16; boundary values are Richardson limits of
/// the stage-b nodes at z = 0.
inline ProfileSolution integrate_profile(const ModelParams& params, double z0_in) {
  params.validate();
  require(z0_in != 0.0, errc::degenerate_initial_height, "initial height z0 must be nonzero");
  require(std::isfinite(z0_in), errc::invalid_argument, "z0 must be finite");
  if (z0_in < 0.0 && params.c0 > 0.0 && z0_in > -1.0 / params.c0)
    fail(errc::forbidden_initial_height,
         "z0 in (-1/c0, 0): the boundary condition cannot hold on this interval");

  ProfileSolution sol;
  sol.params = params;
  sol.c0 = params.c0;
  sol.flipped = z0_in < 0.0;
  sol.z0 = std::abs(z0_in);
  sol.sigma0 = params.resolved_sigma0(sol.z0);
  sol.sigma_max = params.resolved_sigma_max(sol.z0);
  sol.z_cut = params.z_cutoff_factor * sol.z0;

  // Dyadic landing heights between z0/2 and the terminal switch height.
  ProfileSolution::Ode::Options opts;
  opts.rel_tol = params.rel_tol;
  opts.abs_tol = params.abs_tol;
  opts.level_component = 1;  // z
  for (double lvl = 0.5 * sol.z0; lvl > sol.z_cut * (1.0 + 1e-12); lvl *= 0.5) {
    opts.levels.push_back(lvl);
    opts.level_terminal.push_back(false);
  }
  opts.levels.push_back(sol.z_cut);
  opts.level_terminal.push_back(true);
  const double r_floor = 1e-2 * sol.sigma0;
  opts.stop_predicate = [r_floor](double, const ProfileSolution::Ode::State& y) {
    return y[0] < r_floor;
  };

  const double c0 = params.c0;
  ProfileSolution::Ode ode(
      [c0](double, const ProfileSolution::Ode::State& y) { return detail::sigma_rhs(c0, y); },
      opts);
  const PointState start = series_point(c0, sol.z0, sol.sigma0);
  sol.stage_a = ode.integrate(sol.sigma0, {start.r, start.z, start.phi, start.u, start.v},
                              sol.sigma_max);

  using Stop = ProfileSolution::Ode::Stop;
  switch (sol.stage_a.stop) {
    case Stop::Event: sol.termination = Termination::HitBoundary; break;
    case Stop::ReachedEnd: sol.termination = Termination::SigmaMaxExceeded; break;
    case Stop::Predicate: sol.termination = Termination::AxisReturn; break;
    default: sol.termination = Termination::StepFailure; break;
  }

  // Record the last landing node for every dyadic height.
  sol.ladder_z = opts.levels;
  sol.ladder_node.assign(opts.levels.size(), -1);
  for (const auto& c : sol.stage_a.crossings)
    sol.ladder_node[c.level_index] = static_cast<std::ptrdiff_t>(c.node_index);

  if (sol.termination != Termination::HitBoundary) return sol;

  // Stage b: z-parametrized continuation through z_cut / 2^k, k = 1..16.
  ProfileSolution::OdeZ::Options zopts;
  zopts.rel_tol = std::min(params.rel_tol, 1e-12);
  zopts.abs_tol = std::min(params.abs_tol, 1e-12);
  ProfileSolution::OdeZ odez(
      [c0](double z, const ProfileSolution::OdeZ::State& y) { return detail::z_rhs(c0, z, y); },
      zopts);

  const auto& ya = sol.stage_a.y_end;
  ProfileSolution::OdeZ::State yb = {sol.stage_a.x_end, ya[0], ya[2], ya[3], ya[4]};
  double zb = ya[1];  // equals z_cut up to landing precision
  ProfileSolution::OdeZ::Solution all;
  all.xs.push_back(zb);
  all.ys.push_back(yb);
  bool ok = true;
  for (int k = 1; k <= 16; ++k) {
    const double z_next = sol.z_cut / std::pow(2.0, k);
    auto leg = odez.integrate(zb, yb, z_next);
    if (leg.stop != ProfileSolution::OdeZ::Stop::ReachedEnd) {
      ok = false;
      break;
    }
    for (std::size_t i = 0; i < leg.steps.size(); ++i) all.steps.push_back(leg.steps[i]);
    for (std::size_t i = 1; i < leg.xs.size(); ++i) {
      all.xs.push_back(leg.xs[i]);
      all.ys.push_back(leg.ys[i]);
    }
    zb = leg.x_end;
    yb = leg.y_end;
  }
  if (!ok) {
    sol.termination = Termination::StepFailure;
    return sol;
  }
  all.x_end = zb;
  all.y_end = yb;
  all.stop = ProfileSolution::OdeZ::Stop::ReachedEnd;
  sol.stage_b = std::move(all);

  // Richardson limits at z = 0 from the deepest stage-b nodes.
  const auto& bx = sol.stage_b.xs;
  const auto& by = sol.stage_b.ys;
  std::vector<double> zs;
  std::vector<std::array<double, 5>> vals;
  for (std::size_t i = bx.size(); i-- > 0 && zs.size() < 8;) {
    zs.push_back(bx[i]);
    vals.push_back(by[i]);
  }
  std::vector<double> comp(zs.size());
  std::array<double, 5> lim{};
  for (int c = 0; c < 5; ++c) {
    for (std::size_t i = 0; i < zs.size(); ++i) comp[i] = vals[i][c];
    lim[c] = neville_at_zero(zs, comp);
  }
  sol.sigma_b = lim[0];
  sol.r_b = lim[1];
  sol.phi_b = lim[2];
  sol.u_b = lim[3];
  sol.v_b = lim[4];
  sol.dphi_b = -2.0 * sol.u_b - std::sin(sol.phi_b) / sol.r_b - 2.0 * c0;
  sol.d2phi_b = -2.0 * sol.v_b;
  sol.r_b_error_estimate =
      100.0 * std::max(params.abs_tol, params.rel_tol * sol.r_b) * std::max(1.0, sol.sigma_b);
  return sol;
}

inline BoundaryTrace boundary_trace(const ProfileSolution& sol) {
  require(sol.hit_boundary(), errc::no_boundary_data,
          std::string("profile terminated with ") + termination_name(sol.termination));
  return {sol.sigma_b, sol.r_b, sol.phi_b, sol.dphi_b, sol.d2phi_b, 0.5 * sol.d2phi_b};
}

/// Flow-consistent states on a strictly increasing arc-length grid, obtained
/// by re-integrating with forced stops (dense-output interpolation is not
/// used, so differences of the returned values stay smooth).
inline std::vector<PointState> resample_on_grid(const ProfileSolution& sol,
                                                const std::vector<double>& grid,
                                                double tol = 1e-12) {
  std::vector<PointState> out;
  out.reserve(grid.size());
  ProfileSolution::Ode::Options opts;
  opts.rel_tol = std::min(sol.params.rel_tol, tol);
  opts.abs_tol = std::min(sol.params.abs_tol, tol);
  const double c0 = sol.c0;
  ProfileSolution::Ode ode(
      [c0](double, const ProfileSolution::Ode::State& y) { return detail::sigma_rhs(c0, y); },
      opts);
  const PointState start = series_point(c0, sol.z0, sol.sigma0);
  double x = sol.sigma0;
  ProfileSolution::Ode::State y = {start.r, start.z, start.phi, start.u, start.v};
  for (double s : grid) {
    require(s >= sol.sigma0 && s <= sol.sigma_switch(), errc::invalid_argument,
            "resample grid point outside the integrated arc range");
    if (s > x) {
      auto leg = ode.integrate(x, y, s);
      require(leg.stop == ProfileSolution::Ode::Stop::ReachedEnd, errc::step_failure,
              "re-integration failed while resampling");
      x = leg.x_end;
      y = leg.y_end;
    }
    out.push_back(ProfileSolution::to_point(x, y));
  }
  return out;
}

}  // namespace rmem
