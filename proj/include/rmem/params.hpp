#pragma once

#include <algorithm>
#include <cmath>

#include "rmem/errors.hpp"

namespace rmem {

/// Model constants and numerical controls for profile integration.
///
/// sigma0 and sigma_max may be left at 0 to pick height-dependent values
/// when integration starts (sigma0 = 1e-4 * max(|z0|, 1), sigma_max =
/// max(64, 32 * |z0|)).
struct ModelParams {
  double c0 = 0.0;               // spontaneous curvature, >= 0
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double sigma0 = 0.0;           // pole start offset; 0 -> automatic
  double z_cutoff_factor = 1e-6; // boundary stop as a fraction of z0, in (0, 1e-4]
  double sigma_max = 0.0;        // hard arc-length cap; 0 -> automatic

  void validate() const {
    require(std::isfinite(c0) && c0 >= 0.0, errc::invalid_argument,
            "spontaneous curvature c0 must be finite and >= 0");
    require(abs_tol > 0.0 && rel_tol > 0.0, errc::invalid_argument,
            "integrator tolerances must be positive");
    require(sigma0 >= 0.0, errc::invalid_argument, "sigma0 must be positive (or 0 for automatic)");
    require(z_cutoff_factor > 0.0 && z_cutoff_factor <= 1e-4, errc::invalid_argument,
            "z_cutoff_factor must lie in (0, 1e-4]");
    require(sigma_max >= 0.0, errc::invalid_argument,
            "sigma_max must be positive (or 0 for automatic)");
  }

  double resolved_sigma0(double z0) const {
    if (sigma0 > 0.0) return sigma0;
    // 1e-4 * max(|z0|, 1), capped by the curvature scale at the pole so the
    // series start stays inside its validity range for large c0 * z0.
    const double pole_slope = 1.0 / std::abs(z0) + c0;
    return std::min(1e-4 * std::max(std::abs(z0), 1.0), 1e-2 / pole_slope);
  }
  double resolved_sigma_max(double z0) const {
    return sigma_max > 0.0 ? sigma_max : std::max(64.0, 32.0 * std::abs(z0));
  }
};

}  // namespace rmem
