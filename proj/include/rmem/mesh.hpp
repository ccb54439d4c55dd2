#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rmem/errors.hpp"
#include "rmem/profile.hpp"
#include "rmem/shooting.hpp"

namespace rmem {

using Vec3 = std::array<double, 3>;

enum class MeshModel { HalfSpace, Ball };

/// Triangulated surface of revolution. Faces are counter-clockwise when
/// viewed from the outward-normal side; closed meshes are watertight.
struct RevolutionMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  MeshModel model = MeshModel::HalfSpace;
  bool closed = false;
};

/// Upper half-space to unit-ball diffeomorphism
/// (x, y, z) -> (2x, 2y, x^2 + y^2 + z^2 - 1) / (x^2 + y^2 + (z+1)^2);
/// the ideal boundary {z = 0} lands on the unit sphere.
inline Vec3 to_ball_model(const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2];
  const double denom = x * x + y * y + (z + 1.0) * (z + 1.0);
  require(denom > 0.0, errc::singular_evaluation,
          "ball-model map is singular at (0, 0, -1)");
  return {2.0 * x / denom, 2.0 * y / denom, (x * x + y * y + z * z - 1.0) / denom};
}

inline RevolutionMesh to_ball_model(RevolutionMesh mesh) {
  for (const Vec3& v : mesh.vertices)
    require(v[2] >= 0.0, errc::invalid_argument,
            "ball-model map applies to half-space meshes (all z >= 0); "
            "reflected meshes lie outside its domain");
  for (Vec3& v : mesh.vertices) v = to_ball_model(v);
  mesh.model = MeshModel::Ball;
  return mesh;
}

/// Sweep the profile around the z-axis: n_sigma arc-length-uniform rings of
/// n_theta vertices, a fan at the pole, and (for reflect) the mirrored half
/// sharing the boundary ring plus a second pole fan.
inline RevolutionMesh revolve(const ProfileSolution& sol, int n_theta, int n_sigma,
                              bool reflect) {
  require(sol.hit_boundary(), errc::no_boundary_data, "profile did not reach the boundary");
  require(n_theta >= 3 && n_sigma >= 2, errc::degenerate_resolution,
          "need n_theta >= 3 and n_sigma >= 2");
  RevolutionMesh mesh;
  mesh.closed = reflect;

  std::vector<std::array<double, 2>> rings;  // (r, z) per ring, top to bottom
  for (int i = 1; i <= n_sigma; ++i) {
    const double s = sol.sigma_b * i / n_sigma;
    const PointState p = (i == n_sigma) ? sol.boundary_state() : sol.state_at(s);
    rings.push_back({p.r, (i == n_sigma) ? 0.0 : p.z});
  }
  if (reflect)
    for (int i = n_sigma - 1; i >= 1; --i) rings.push_back({rings[i - 1][0], -rings[i - 1][1]});

  mesh.vertices.push_back({0.0, 0.0, sol.z0});
  const int n_rings = static_cast<int>(rings.size());
  for (const auto& rz : rings)
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * kPi * j / n_theta;
      mesh.vertices.push_back({rz[0] * std::cos(th), rz[0] * std::sin(th), rz[1]});
    }
  if (reflect) mesh.vertices.push_back({0.0, 0.0, -sol.z0});

  auto ring_vertex = [&](int ring, int j) { return 1 + ring * n_theta + (j % n_theta); };
  // Top fan.
  for (int j = 0; j < n_theta; ++j)
    mesh.faces.push_back({0, ring_vertex(0, j), ring_vertex(0, j + 1)});
  // Bands.
  for (int i = 0; i + 1 < n_rings; ++i)
    for (int j = 0; j < n_theta; ++j) {
      const int a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
      const int c = ring_vertex(i + 1, j + 1), d = ring_vertex(i + 1, j);
      mesh.faces.push_back({a, d, c});
      mesh.faces.push_back({a, c, b});
    }
  if (reflect) {
    const int bot = static_cast<int>(mesh.vertices.size()) - 1;
    for (int j = 0; j < n_theta; ++j)
      mesh.faces.push_back({bot, ring_vertex(n_rings - 1, j + 1), ring_vertex(n_rings - 1, j)});
  }
  return mesh;
}

inline double mesh_area(const RevolutionMesh& mesh) {
  double acc = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3 &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    const Vec3 u = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 v = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const Vec3 n = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0]};
    acc += 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  }
  return acc;
}

/// Six times the signed volume enclosed by a closed mesh; positive for
/// outward-oriented faces.
inline double mesh_signed_volume6(const RevolutionMesh& mesh) {
  double acc = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3 &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    acc += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
           a[2] * (b[0] * c[1] - b[1] * c[0]);
  }
  return acc;
}

struct ResidualRow {
  double z0 = 0.0;
  double residual_mean = 0.0;
  double residual_phi2 = 0.0;
  bool ok = false;
  std::string reason;
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
};

/// Tabulate both equilibrium residuals over a grid of initial heights for
/// external plotting. Failed integrations become rows flagged with the
/// failure reason and are omitted from CSV output.
inline ResidualTable residual_curve_data(const ModelParams& params,
                                         const std::vector<double>& z_grid) {
  params.validate();
  require(params.c0 > 0.0, errc::c0_zero, "residual curves need c0 > 0");
  ResidualTable table;
  for (double z0 : z_grid) {
    ResidualRow row;
    row.z0 = z0;
    try {
      auto sol = integrate_profile(params, z0);
      require(sol.hit_boundary(), errc::step_failure,
              std::string("integration terminated with ") + termination_name(sol.termination));
      row.residual_phi2 = sol.d2phi_b;
      row.residual_mean = mean_curvature_excess(AxisymmetricSurface::from_profile(std::move(sol)));
      row.ok = true;
    } catch (const error& e) {
      row.reason = e.what();
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace rmem
