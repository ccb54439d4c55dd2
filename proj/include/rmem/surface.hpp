#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "rmem/errors.hpp"
#include "rmem/numerics.hpp"
#include "rmem/profile.hpp"

namespace rmem {

/// Quadrature node on an axisymmetric surface. `u` is the carried nu3/z
/// value (exact for closed-form surfaces), `w` the pointwise ratio
/// cos(phi)/z, kept separate so that integrands can choose the literal
/// geometric quantity where the definition asks for it.
struct SurfacePoint {
  double sigma = 0.0;
  double r = 0.0;
  double z = 0.0;
  double phi = 0.0;
  double u = 0.0;
  double w = 0.0;
  double H = 0.0;
  double kappa_m = 0.0;
  double kappa_p = 0.0;
  double K = 0.0;
};

/// Row of a sampled profile (as read back from a profile CSV).
struct SampledRow {
  double sigma = 0.0, r = 0.0, z = 0.0, phi = 0.0;
};

/// Admissible surface of revolution: either an integrated generating curve,
/// a closed-form hemisphere of radius R centered on {z = 0}, or a sampled
/// curve reconstructed from rows. Provides composite Gauss-Legendre
/// quadrature of sigma-integrands over the full curve, with the profile
/// tail below the cutoff handled in the z variable.
class AxisymmetricSurface {
 public:
  static constexpr double kOrthogonalityGate = 1e-4;

  static AxisymmetricSurface from_profile(ProfileSolution sol) {
    AxisymmetricSurface s;
    s.c0_ = sol.c0;
    s.prof_ = std::make_shared<ProfileSolution>(std::move(sol));
    return s;
  }

  static AxisymmetricSurface hemisphere(double radius, double c0) {
    require(radius > 0.0, errc::non_positive_radius, "hemisphere radius must be positive");
    require(c0 >= 0.0, errc::invalid_argument, "c0 must be >= 0");
    AxisymmetricSurface s;
    s.c0_ = c0;
    s.radius_ = radius;
    return s;
  }

  static AxisymmetricSurface from_samples(std::vector<SampledRow> rows, double c0) {
    require(rows.size() >= 4, errc::invalid_argument, "sampled surface needs at least 4 rows");
    AxisymmetricSurface s;
    s.c0_ = c0;
    s.rows_ = std::move(rows);
    return s;
  }

  bool is_profile() const { return prof_ != nullptr; }
  bool is_hemisphere() const { return radius_ > 0.0; }
  const ProfileSolution& profile() const { return *prof_; }
  double hemisphere_radius() const { return radius_; }
  double c0() const { return c0_; }

  double sigma_end() const {
    if (is_hemisphere()) return radius_ * kPi / 2.0;
    if (is_profile()) return prof_->sigma_b;
    return rows_.back().sigma;
  }

  double boundary_radius() const {
    if (is_hemisphere()) return radius_;
    if (is_profile()) return prof_->r_b;
    return rows_.back().r;
  }

  double boundary_phi() const {
    if (is_hemisphere()) return -kPi / 2.0;
    if (is_profile()) return prof_->phi_b;
    return rows_.back().phi;
  }

  /// phi' at the boundary (regular limit 2 c0 - 1/r_b for non-profiles).
  double boundary_dphi() const {
    if (is_profile()) return prof_->dphi_b;
    return 2.0 * c0_ - 1.0 / boundary_radius();
  }

  bool admissible() const {
    if (is_hemisphere()) return true;
    if (is_profile() && !prof_->hit_boundary()) return false;
    return std::abs(boundary_phi() + kPi / 2.0) < kOrthogonalityGate;
  }

  void require_admissible() const {
    if (is_profile() && !prof_->hit_boundary())
      fail(errc::not_admissible, std::string("profile terminated with ") +
                                     termination_name(prof_->termination));
    require(admissible(), errc::not_admissible,
            "surface does not meet {z=0} orthogonally");
  }

  /// Integral of f over the generating curve, d sigma measure.
  template <class F>
  double integrate(F&& f) const {
    if (is_hemisphere()) return integrate_hemisphere(f);
    if (is_profile()) return integrate_profile_surface(f);
    return integrate_sampled(f);
  }

  SurfacePoint point_at(double sigma) const {
    if (is_hemisphere()) return hemisphere_point(sigma);
    if (is_profile()) return profile_point(prof_->state_at(sigma));
    return sampled_point(sigma);
  }

 private:
  double c0_ = 0.0;
  std::shared_ptr<ProfileSolution> prof_;
  double radius_ = 0.0;
  std::vector<SampledRow> rows_;

  SurfacePoint hemisphere_point(double sigma) const {
    const double R = radius_;
    const double psi = sigma / R;
    SurfacePoint p;
    p.sigma = sigma;
    p.r = R * std::sin(psi);
    p.z = R * std::cos(psi);
    p.phi = -psi;
    p.u = 1.0 / R;
    p.w = (p.z > 0.0) ? std::cos(p.phi) / p.z : 1.0 / R;
    p.kappa_m = -1.0 / R;
    p.kappa_p = -1.0 / R;
    p.H = -1.0 / R;
    p.K = 1.0 / (R * R);
    return p;
  }

  SurfacePoint profile_point(const PointState& s) const {
    SurfacePoint p;
    p.sigma = s.sigma;
    p.r = s.r;
    p.z = s.z;
    p.phi = s.phi;
    p.u = s.u;
    // Below the cutoff the pointwise ratio amplifies the phi error by 1/z;
    // the carried state is the accurate value of nu3/z there.
    const double z_lit = prof_ ? 0.999 * prof_->z_cut : 0.0;
    p.w = (s.z > z_lit && s.z > 0.0) ? std::cos(s.phi) / s.z : s.u;
    const Curvatures c = curvatures_at(s, c0_);
    p.kappa_m = c.kappa_meridian;
    p.kappa_p = c.kappa_parallel;
    p.H = c.H;
    p.K = c.K;
    return p;
  }

  template <class F>
  double integrate_hemisphere(F& f) const {
    const double se = sigma_end();
    const int panels = 96;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = se * i / panels, b = se * (i + 1) / panels;
      acc += gauss_panel([&](double s) { return f(hemisphere_point(s)); }, a, b, 12);
    }
    return acc;
  }

  template <class F>
  double integrate_profile_surface(F& f) const {
    const ProfileSolution& sol = *prof_;
    double acc = 0.0;
    // Pole cap [0, sigma0] on the series representation.
    acc += gauss_panel(
        [&](double s) { return f(profile_point(series_point(c0_, sol.z0, s))); }, 0.0,
        sol.sigma0, 8);
    // One panel per accepted step; the dense interpolant is quartic, so a
    // 6-point rule integrates smooth compositions essentially exactly.
    for (const auto& st : sol.stage_a.steps) {
      const double a = st.x0, b = st.x0 + st.h;
      acc += gauss_panel(
          [&](double s) { return f(profile_point(ProfileSolution::to_point(s, st.eval(s)))); },
          a, b, 6);
    }
    if (!sol.hit_boundary()) return acc;
    // Tail below the cutoff in the z variable: d sigma = dz / sin(phi).
    for (const auto& st : sol.stage_b.steps) {
      const double a = st.x0, b = st.x0 + st.h;
      acc += gauss_panel(
          [&](double zq) {
            const PointState s = ProfileSolution::to_point_z(zq, st.eval(zq));
            return f(profile_point(s)) / std::sin(s.phi);
          },
          a, b, 6);
    }
    // Remaining sliver [0, z_floor] with the boundary state as integrand value.
    const double z_floor = sol.stage_b.x_end;
    acc += f(profile_point(sol.boundary_state())) * z_floor;
    return acc;
  }

  SampledRow hermite_row(double sigma) const {
    // Locate the bracketing rows, then cubic Hermite with analytic slopes
    // r' = cos(phi), z' = sin(phi), phi' from the angle equation.
    std::size_t lo = 0, hi = rows_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (rows_[mid].sigma <= sigma) lo = mid; else hi = mid;
    }
    const SampledRow& a = rows_[lo];
    const SampledRow& b = rows_[hi];
    const double h = b.sigma - a.sigma;
    if (h <= 0.0) return a;
    const double t = (sigma - a.sigma) / h;
    auto slope = [&](const SampledRow& q, int comp) {
      const double c = std::cos(q.phi), s = std::sin(q.phi);
      if (comp == 0) return c;
      if (comp == 1) return s;
      if (q.r <= 0.0) return pole_phi_slope(c0_, q.z);
      if (q.z <= 0.0) return 2.0 * c0_ - 1.0 / q.r;
      return -2.0 * c / q.z - s / q.r - 2.0 * c0_;
    };
    auto herm = [&](double ya, double yb, double da, double db) {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * da +
             (-2 * t3 + 3 * t2) * yb + (t3 - t2) * h * db;
    };
    SampledRow out;
    out.sigma = sigma;
    out.r = herm(a.r, b.r, slope(a, 0), slope(b, 0));
    out.z = herm(a.z, b.z, slope(a, 1), slope(b, 1));
    out.phi = herm(a.phi, b.phi, slope(a, 2), slope(b, 2));
    return out;
  }

  SurfacePoint sampled_point(double sigma) const {
    const SampledRow s = hermite_row(sigma);
    SurfacePoint p;
    p.sigma = s.sigma;
    p.r = s.r;
    p.z = s.z;
    p.phi = s.phi;
    const double c = std::cos(s.phi), sn = std::sin(s.phi);
    if (s.z > 0.0 && s.r > 0.0) {
      p.w = c / s.z;
      p.kappa_m = -2.0 * p.w - sn / s.r - 2.0 * c0_;
      p.kappa_p = sn / s.r;
    } else {
      p.w = -(2.0 * c0_ - 1.0 / std::max(s.r, 1e-300));
      p.kappa_m = 2.0 * c0_ - 1.0 / std::max(s.r, 1e-300);
      p.kappa_p = -1.0 / std::max(s.r, 1e-300);
    }
    p.u = p.w;
    p.H = 0.5 * (p.kappa_m + p.kappa_p);
    p.K = p.kappa_m * p.kappa_p;
    return p;
  }

  template <class F>
  double integrate_sampled(F& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rows_.size(); ++i) {
      const double a = rows_[i].sigma, b = rows_[i + 1].sigma;
      if (b <= a) continue;
      acc += gauss_panel([&](double s) { return f(sampled_point(s)); }, a, b, 8);
    }
    return acc;
  }
};

}  // namespace rmem
