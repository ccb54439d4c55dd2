#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "rmem/io.hpp"
#include "rmem/mesh.hpp"

using namespace rmem;

namespace {
ProfileSolution circle(double z0) {
  ModelParams p;
  return integrate_profile(p, z0);
}

std::map<std::pair<int, int>, int> edge_counts(const RevolutionMesh& m) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  return edges;
}
}  // namespace

TEST_CASE("revolve vertex counts") {
  auto sol = circle(1.0);
  const auto open = revolve(sol, 4, 2, false);
  CHECK(open.vertices.size() == 9);  // pole + two rings of four
  CHECK(!open.closed);
  const auto closed = revolve(sol, 4, 2, true);
  CHECK(closed.vertices.size() == (2 * 2 - 1) * 4 + 2);
  CHECK(closed.closed);
  CHECK_THROWS_AS(revolve(sol, 2, 2, false), error);
  CHECK_THROWS_AS(revolve(sol, 4, 1, false), error);
}

TEST_CASE("closed meshes are watertight with Euler characteristic 2") {
  ModelParams p;
  p.c0 = 1.0;
  auto sol = integrate_profile(p, 1.8526338193);  // near the first equilibrium
  const auto mesh = revolve(sol, 24, 40, true);
  const auto edges = edge_counts(mesh);
  for (const auto& [e, cnt] : edges) CHECK(cnt == 2);
  const int V = static_cast<int>(mesh.vertices.size());
  const int E = static_cast<int>(edges.size());
  const int F = static_cast<int>(mesh.faces.size());
  CHECK(V - E + F == 2);
  CHECK(mesh_signed_volume6(mesh) > 0.0);  // outward orientation
}

TEST_CASE("doubled hemisphere mesh lies on the sphere") {
  auto sol = circle(2.0);
  const auto mesh = revolve(sol, 16, 32, true);
  for (const auto& v : mesh.vertices) {
    const double d = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    CHECK(std::abs(d - 2.0) < 1e-8);
  }
}

TEST_CASE("mesh area converges to the surface area at second order") {
  auto sol = circle(1.0);
  const double exact = 2.0 * kPi;  // hemisphere area 2 pi R^2
  const double e1 = std::abs(mesh_area(revolve(sol, 16, 16, false)) - exact);
  const double e2 = std::abs(mesh_area(revolve(sol, 32, 32, false)) - exact);
  CHECK(std::log2(e1 / e2) > 1.7);
}

TEST_CASE("revolve and reflect commute on vertex sets") {
  auto sol = circle(1.3);
  const auto direct = revolve(sol, 8, 6, true);
  auto open = revolve(sol, 8, 6, false);
  std::vector<Vec3> mirrored = open.vertices;
  for (auto& v : mirrored) v[2] = -v[2];
  std::vector<Vec3> all = open.vertices;
  all.insert(all.end(), mirrored.begin(), mirrored.end());
  auto key = [](const Vec3& v) {
    return std::array<long long, 3>{llround(v[0] * 1e10), llround(v[1] * 1e10),
                                    llround(v[2] * 1e10)};
  };
  std::vector<std::array<long long, 3>> a, b;
  for (const auto& v : direct.vertices) a.push_back(key(v));
  for (const auto& v : all) b.push_back(key(v));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  CHECK(a == b);
}

TEST_CASE("ball-model map rejects reflected meshes and keeps open ones inside") {
  auto sol = circle(1.0);
  CHECK_THROWS_AS(to_ball_model(revolve(sol, 8, 8, true)), error);
  const auto ball = to_ball_model(revolve(sol, 8, 8, false));
  CHECK(ball.model == MeshModel::Ball);
  for (const auto& v : ball.vertices)
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0 + 1e-12);
}

TEST_CASE("ball-model map point values") {
  const Vec3 a = to_ball_model({0.0, 0.0, 1.0});
  CHECK(std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) < 1e-15);
  const Vec3 b = to_ball_model({1.0, 0.0, 0.0});
  CHECK(std::abs(b[0] - 1.0) < 1e-15);
  const Vec3 c = to_ball_model({0.0, 0.0, 3.0});
  CHECK(std::abs(c[2] - 0.5) < 1e-15);
  CHECK_THROWS_AS(to_ball_model(Vec3{0.0, 0.0, -1.0}), error);
}

TEST_CASE("ball-model image of a hemisphere meets the sphere orthogonally") {
  // Parametrize the hemisphere of radius R, map to the ball, and compare the
  // image surface normal with the unit-sphere normal at boundary points.
  const double R = 1.5;
  auto embed = [&](double psi, double th) {
    return to_ball_model({R * std::sin(psi) * std::cos(th), R * std::sin(psi) * std::sin(th),
                          R * std::cos(psi)});
  };
  for (double th : {0.3, 2.0, 4.4}) {
    const double psi = kPi / 2.0;  // boundary circle
    const double h = 1e-4;
    Vec3 p = embed(psi, th);
    Vec3 dpsi, dth;
    for (int i = 0; i < 3; ++i) {
      dpsi[i] = (embed(psi + h, th)[i] - embed(psi - h, th)[i]) / (2 * h);
      dth[i] = (embed(psi, th + h)[i] - embed(psi, th - h)[i]) / (2 * h);
    }
    const Vec3 n = {dpsi[1] * dth[2] - dpsi[2] * dth[1], dpsi[2] * dth[0] - dpsi[0] * dth[2],
                    dpsi[0] * dth[1] - dpsi[1] * dth[0]};
    const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    const double pn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    CHECK(std::abs(pn - 1.0) < 1e-12);  // boundary lands on the unit sphere
    const double cosang = (n[0] * p[0] + n[1] * p[1] + n[2] * p[2]) / (nn * pn);
    CHECK(std::abs(cosang) < 1e-6);  // surface normal tangent to the sphere
  }
}

TEST_CASE("residual table brackets the first root") {
  ModelParams p;
  p.c0 = 1.0;
  const auto table = residual_curve_data(p, {1.8, 1.9});
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.rows[0].ok);
  REQUIRE(table.rows[1].ok);
  CHECK((table.rows[0].residual_mean > 0) != (table.rows[1].residual_mean > 0));
  CHECK((table.rows[0].residual_phi2 > 0) != (table.rows[1].residual_phi2 > 0));
  CHECK(residual_curve_data(p, {}).rows.empty());
  ModelParams p0;
  CHECK_THROWS_AS(residual_curve_data(p0, {1.0}), error);
}

TEST_CASE("residual table vanishes at the known roots") {
  ModelParams p;
  p.c0 = 1.0;
  const auto table = residual_curve_data(p, {1.8526338193, 3.3421864890});
  for (const auto& row : table.rows) {
    REQUIRE(row.ok);
    CHECK(std::abs(row.residual_mean) < 1e-7);
    CHECK(std::abs(row.residual_phi2) < 1e-7);
  }
}

TEST_CASE("profile CSV round-trips bit-exact states and recovers c0") {
  ModelParams p;
  p.c0 = 1.0;
  auto sol = integrate_profile(p, 1.2);
  const std::string csv = profile_csv_string(sol);
  const auto parsed = parse_profile_csv(csv);
  CHECK(std::abs(parsed.c0 - 1.0) < 1e-9);
  const auto rows = sol.samples();
  REQUIRE(parsed.rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed.rows[i].sigma == rows[i].sigma);
    CHECK(parsed.rows[i].r == rows[i].r);
    CHECK(parsed.rows[i].z == rows[i].z);
    CHECK(parsed.rows[i].phi == rows[i].phi);
  }
  CHECK(csv.substr(0, csv.find('\n')) == "sigma,r,z,phi,H,K,nu3");
}

TEST_CASE("obj output lists vertices then 1-based faces") {
  auto sol = circle(1.0);
  const auto mesh = revolve(sol, 4, 2, false);
  const std::string obj = obj_string(mesh);
  std::size_t nv = 0, nf = 0, pos = 0;
  std::istringstream in(obj);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++nv;
    if (line.rfind("f ", 0) == 0) ++nf;
  }
  (void)pos;
  CHECK(nv == 9);
  CHECK(nf == mesh.faces.size());
  CHECK(obj.find("f 1 2 3") != std::string::npos);
}

TEST_CASE("json writers expose the exact key sets") {
  EnergyReport rep;
  rep.A_R = -kTwoPi;
  const json je = energy_json(rep);
  CHECK(je.size() == 7);
  for (const char* k :
       {"A_R", "U_R", "G_R", "helfrich", "excess", "theorem1_residual", "method_discrepancy"})
    CHECK(je.contains(k));
  // Doubles survive a dump/parse cycle bit-exactly.
  const json back = json::parse(je.dump());
  CHECK(back["A_R"].get<double>() == rep.A_R);

  VerificationReport vr;
  const json jv = verification_json(vr);
  for (const char* k : {"rme_max", "el_max", "orthogonality", "hz0", "dnH", "u_r_abs",
                        "rescaling", "c3_gap", "kappa_g", "all_pass", "tolerances"})
    CHECK(jv.contains(k));
}

TEST_CASE("atomic writes fail cleanly on bad paths") {
  CHECK_THROWS_AS(atomic_write("/nonexistent-dir/x/y.txt", "data"), error);
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "rmem_io_test";
  fs::create_directories(dir);
  const auto path = (dir / "report.json").string();
  atomic_write(path, "{}\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "{}\n");
  fs::remove_all(dir);
}
