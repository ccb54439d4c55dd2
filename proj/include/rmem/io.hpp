#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmem/errors.hpp"
#include "rmem/functionals.hpp"
#include "rmem/mesh.hpp"
#include "rmem/profile.hpp"
#include "rmem/shooting.hpp"
#include "rmem/surface.hpp"
#include "rmem/verify.hpp"

namespace rmem {

using json = nlohmann::json;

/// Shortest representation that round-trips the exact double.
inline std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Write via a temporary file in the same directory, then rename.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  try {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(errc::io_failure, "cannot open " + tmp.string() + " for writing");
      out << content;
      if (!out.good()) fail(errc::io_failure, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
  } catch (const fs::filesystem_error& e) {
    fail(errc::io_failure, std::string("writing ") + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Profile CSV: header sigma,r,z,phi,H,K,nu3, one row per dense sample.

inline std::string profile_csv_string(const ProfileSolution& sol) {
  std::string out = "sigma,r,z,phi,H,K,nu3\n";
  const auto rows = sol.samples();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PointState& p = rows[i];
    Curvatures c;
    if (i == 0)
      c = curvatures_at(p.curve(), sol.c0, PointKind::Pole);
    else if (sol.hit_boundary() && i + 1 == rows.size())
      c = curvatures_at(p.curve(), sol.c0, PointKind::Boundary);
    else
      c = curvatures_at(p, sol.c0);
    out += fmt_double(p.sigma) + ',' + fmt_double(p.r) + ',' + fmt_double(p.z) + ',' +
           fmt_double(p.phi) + ',' + fmt_double(c.H) + ',' + fmt_double(c.K) + ',' +
           fmt_double(c.nu3) + '\n';
  }
  return out;
}

inline void write_profile_csv(const ProfileSolution& sol, const std::string& path) {
  atomic_write(path, profile_csv_string(sol));
}

struct ParsedProfile {
  std::vector<SampledRow> rows;
  double c0 = 0.0;
};

/// Read a profile CSV back. The spontaneous curvature is recovered from the
/// stored columns through the reduced membrane equation, c0 = -H - nu3/z,
/// evaluated away from the boundary.
inline ParsedProfile parse_profile_csv(const std::string& text) {
  ParsedProfile out;
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::io_failure, "empty profile CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "sigma,r,z,phi,H,K,nu3", errc::io_failure,
          "unexpected profile CSV header: " + line);
  std::vector<double> c0_votes;
  double z_max = 0.0;
  std::vector<std::array<double, 7>> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 7> vals{};
    std::size_t pos = 0;
    for (int k = 0; k < 7; ++k) {
      const std::size_t next = line.find(',', pos);
      const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
      try {
        vals[k] = std::stod(tok);
      } catch (...) {
        fail(errc::io_failure, "bad numeric field in profile CSV: " + tok);
      }
      pos = (next == std::string::npos) ? line.size() : next + 1;
    }
    raw.push_back(vals);
    z_max = std::max(z_max, vals[2]);
  }
  require(raw.size() >= 4, errc::io_failure, "profile CSV has too few rows");
  for (const auto& v : raw) {
    out.rows.push_back({v[0], v[1], v[2], v[3]});
    if (v[2] > 0.5 * z_max) c0_votes.push_back(-v[4] - v[6] / v[2]);
  }
  std::sort(c0_votes.begin(), c0_votes.end());
  double c0 = c0_votes[c0_votes.size() / 2];
  if (std::abs(c0) < 1e-9) c0 = 0.0;
  require(c0 >= 0.0, errc::io_failure, "recovered spontaneous curvature is negative");
  out.c0 = c0;
  return out;
}

inline ParsedProfile read_profile_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile_csv(ss.str());
}

// ---------------------------------------------------------------------------
// Residual table CSV: header z0,residual_mean,residual_phi2.

inline std::string residual_csv_string(const ResidualTable& table) {
  std::string out = "z0,residual_mean,residual_phi2\n";
  for (const auto& row : table.rows) {
    if (!row.ok) continue;
    out += fmt_double(row.z0) + ',' + fmt_double(row.residual_mean) + ',' +
           fmt_double(row.residual_phi2) + '\n';
  }
  return out;
}

inline void write_residual_csv(const ResidualTable& table, const std::string& path) {
  atomic_write(path, residual_csv_string(table));
}

// ---------------------------------------------------------------------------
// OBJ: v lines then 1-based f lines.

inline std::string obj_string(const RevolutionMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 20);
  for (const Vec3& v : mesh.vertices)
    out += "v " + fmt_double(v[0]) + ' ' + fmt_double(v[1]) + ' ' + fmt_double(v[2]) + '\n';
  for (const auto& f : mesh.faces)
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
           std::to_string(f[2] + 1) + '\n';
  return out;
}

inline void write_obj(const RevolutionMesh& mesh, const std::string& path) {
  atomic_write(path, obj_string(mesh));
}

// ---------------------------------------------------------------------------
// JSON objects (key sets fixed by the file formats this tool emits).

inline json energy_json(const EnergyReport& rep) {
  return json{{"A_R", rep.A_R},
              {"U_R", rep.U_R},
              {"G_R", rep.G_R},
              {"helfrich", rep.helfrich},
              {"excess", rep.excess},
              {"theorem1_residual", rep.theorem1_residual},
              {"method_discrepancy", rep.method_discrepancy}};
}

inline json verification_json(const VerificationReport& rep) {
  return json{{"rme_max", rep.rme_max},
              {"el_max", rep.el_max},
              {"orthogonality", rep.orthogonality},
              {"hz0", rep.hz0},
              {"dnH", rep.dnH},
              {"u_r_abs", rep.u_r_abs},
              {"rescaling", rep.rescaling},
              {"c3_gap", rep.c3_gap},
              {"kappa_g", rep.kappa_g},
              {"all_pass", rep.all_pass},
              {"tolerances",
               {{"rme", rep.tolerances.rme},
                {"el", rep.tolerances.el},
                {"orthogonality", rep.tolerances.orthogonality},
                {"hz0", rep.tolerances.hz0},
                {"dnH", rep.tolerances.dnH},
                {"u_r", rep.tolerances.u_r},
                {"rescaling", rep.tolerances.rescaling},
                {"c3", rep.tolerances.c3},
                {"kappa_g", rep.tolerances.kappa_g}}}};
}

inline json branch_json(const std::vector<BranchEntry>& entries) {
  json arr = json::array();
  for (const BranchEntry& e : entries) {
    json energies = energy_json(e.energies);
    energies.erase("method_discrepancy");
    arr.push_back(json{{"index", e.index},
                       {"z0_root", e.z0_root},
                       {"r_b", e.profile.r_b},
                       {"sigma_b", e.profile.sigma_b},
                       {"energies", energies},
                       {"verification", verification_json(e.verification)}});
  }
  return arr;
}

inline void write_json(const json& j, const std::string& path) {
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace rmem
