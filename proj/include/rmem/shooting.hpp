#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rmem/errors.hpp"
#include "rmem/functionals.hpp"
#include "rmem/numerics.hpp"
#include "rmem/profile.hpp"
#include "rmem/verify.hpp"

namespace rmem {

struct ShootingOptions {
  double root_tol = 1e-8;        // |residual_mean| accepted at a root
  double phi2_tol = 1e-6;        // |residual_phi2| cross-check at a root
  double z_scan_lo = 0.05;       // canonical scan window start
  int samples_per_octave = 96;   // log-spaced scan density
  int max_octaves = 14;          // expansion budget for find_equilibria
};

/// Mean-curvature-excess residual \int (H + c0) dSigma / (2 pi)
///   = \int_0^{sigma_b} (H + c0) r d sigma.
/// Vanishes exactly at equilibria when c0 > 0 (it equals U_R / (2 pi)
/// on reduced-membrane profiles). For c0 = 0 it does not characterize
/// equilibria; callers probing for equilibria must set equilibrium_mode.
inline double residual_mean(const ModelParams& params, double z0, bool equilibrium_mode = false) {
  if (equilibrium_mode)
    require(params.c0 > 0.0, errc::c0_zero,
            "residual_mean does not characterize equilibria at c0 = 0");
  auto sol = integrate_profile(params, z0);
  require(sol.hit_boundary(), errc::step_failure,
          std::string("integration terminated with ") + termination_name(sol.termination));
  return mean_curvature_excess(AxisymmetricSurface::from_profile(std::move(sol)));
}

/// phi'' at the boundary; vanishes exactly at equilibria (dH/dn = 0).
inline double residual_phi2(const ModelParams& params, double z0) {
  return boundary_trace(integrate_profile(params, z0)).d2phi_b;
}

struct Bracket {
  double z_lo = 0.0, z_hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
};

struct ScanSample {
  double z0 = 0.0;
  double residual = 0.0;
  bool ok = false;
  std::string reason;
};

struct ScanResult {
  bool degenerate_c0_zero = false;  // every z0 is an equilibrium hemisphere
  std::vector<Bracket> brackets;
  std::vector<ScanSample> samples;
};

/// Evaluate residual_mean on a log-spaced grid over [z_min, z_max] and
/// collect sign-change brackets. Failed integrations are skipped and
/// recorded. At c0 = 0 the scan reports degeneracy instead of brackets.
inline ScanResult scan_brackets(const ModelParams& params, double z_min, double z_max,
                                int n_samples) {
  params.validate();
  require(z_min < z_max, errc::empty_range, "scan range is empty (z_min >= z_max)");
  require(z_min > 0.0, errc::invalid_argument, "scan range must be positive");
  require(n_samples >= 2, errc::invalid_argument, "scan needs at least 2 samples");
  ScanResult res;
  if (params.c0 == 0.0) {
    res.degenerate_c0_zero = true;
    return res;
  }
  const double ratio = std::log(z_max / z_min);
  ScanSample prev;
  for (int i = 0; i < n_samples; ++i) {
    ScanSample s;
    s.z0 = z_min * std::exp(ratio * i / (n_samples - 1));
    try {
      s.residual = residual_mean(params, s.z0, true);
      s.ok = true;
    } catch (const error& e) {
      s.reason = e.what();
    }
    if (s.ok && prev.ok && (prev.residual > 0.0) != (s.residual > 0.0))
      res.brackets.push_back({prev.z0, s.z0, prev.residual, s.residual});
    res.samples.push_back(s);
    prev = s;
  }
  return res;
}

struct RootResult {
  double z0_root = 0.0;
  double residual = 0.0;
  double bracket_width = 0.0;
  int iterations = 0;
};

/// Refine one sign-change bracket of residual_mean by Brent's method
/// (bisection with inverse quadratic acceleration). A refined point only
/// counts as a root if the residual itself drops below root_tol; a bracket
/// that shrinks onto a jump is reported as lost.
inline RootResult refine_root(const ModelParams& params, const Bracket& br,
                              const ShootingOptions& opts = {}) {
  if (br.z_lo == br.z_hi) return {br.z_lo, br.f_lo, 0.0, 0};
  require((br.f_lo > 0.0) != (br.f_hi > 0.0), errc::lost_bracket,
          "bracket endpoints have equal residual signs");
  auto f = [&](double z) { return residual_mean(params, z, true); };
  const auto res = brent(f, br.z_lo, br.z_hi, br.f_lo, br.f_hi, 0.0, 1e-13, 200);
  require(res.converged, errc::lost_bracket,
          "bracket refinement failed to converge near z0 = " + std::to_string(res.root));
  require(std::abs(res.f_root) < opts.root_tol, errc::lost_bracket,
          "residual does not vanish at the refined point z0 = " + std::to_string(res.root) +
              " (likely a jump, not a root)");
  return {res.root, res.f_root, 1e-13 * res.root, res.iterations};
}

/// One equilibrium of -G_R: the root, its profile, energies, and the full
/// verification record.
struct BranchEntry {
  int index = 0;
  double z0_root = 0.0;
  double residual_mean_at_root = 0.0;
  double residual_phi2_at_root = 0.0;
  ProfileSolution profile;
  EnergyReport energies;
  VerificationReport verification;
};

/// Locate the first `count` equilibria ordered by increasing z0. Scans
/// octave windows [z_lo 2^j, z_lo 2^(j+1)] on a fixed log grid, refines
/// every sign change in order, and cross-checks each candidate against the
/// boundary residual phi''_b. Deterministic for fixed inputs; the scan grid
/// never changes with `count`, so shorter runs are prefixes of longer ones.
inline std::vector<BranchEntry> find_equilibria(const ModelParams& params, int count,
                                                const ShootingOptions& opts = {},
                                                const VerificationTolerances& vtol = {}) {
  params.validate();
  require(params.c0 > 0.0, errc::c0_zero, "equilibrium search requires c0 > 0");
  require(count >= 1, errc::invalid_argument, "count must be >= 1");
  std::vector<BranchEntry> out;
  double prev_root = 0.0;
  for (int octave = 0; octave < opts.max_octaves && static_cast<int>(out.size()) < count;
       ++octave) {
    const double wlo = opts.z_scan_lo * std::pow(2.0, octave);
    const double whi = 2.0 * wlo;
    const ScanResult scan = scan_brackets(params, wlo, whi, opts.samples_per_octave + 1);
    for (const Bracket& br : scan.brackets) {
      if (static_cast<int>(out.size()) >= count) break;
      RootResult root;
      try {
        root = refine_root(params, br, opts);
      } catch (const error&) {
        continue;  // jump or noise, not an equilibrium
      }
      if (root.z0_root <= prev_root) continue;
      auto sol = integrate_profile(params, root.z0_root);
      if (!sol.hit_boundary()) continue;
      const double phi2 = sol.d2phi_b;
      if (std::abs(phi2) > opts.phi2_tol) continue;  // fails the cross-check
      BranchEntry entry;
      entry.index = static_cast<int>(out.size()) + 1;
      entry.z0_root = root.z0_root;
      entry.residual_mean_at_root = root.residual;
      entry.residual_phi2_at_root = phi2;
      entry.verification = verify_profile(sol, vtol);
      entry.energies = compute_energies(AxisymmetricSurface::from_profile(sol));
      entry.profile = std::move(sol);
      prev_root = root.z0_root;
      out.push_back(std::move(entry));
    }
  }
  require(static_cast<int>(out.size()) >= count, errc::budget_exceeded,
          "scan budget exhausted after " + std::to_string(opts.max_octaves) +
              " octaves with " + std::to_string(out.size()) + " roots found");
  return out;
}

}  // namespace rmem
