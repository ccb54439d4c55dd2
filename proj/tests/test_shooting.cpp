#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rmem/shooting.hpp"

using namespace rmem;

TEST_CASE("mean residual of the unit circle") {
  ModelParams p;
  // int (H + 0) r dsigma = -int sin(sigma) dsigma = -1 over [0, pi/2].
  CHECK(std::abs(residual_mean(p, 1.0) - (-1.0)) < 1e-8);
  CHECK_THROWS_AS(residual_mean(p, 1.0, true), error);
}

TEST_CASE("boundary residual vanishes on circles") {
  ModelParams p;
  for (double z0 : {0.4, 1.0, 2.7}) CHECK(std::abs(residual_phi2(p, z0)) < 1e-8);
}

TEST_CASE("scan rejects bad ranges and degenerates at c0 = 0") {
  ModelParams p;
  CHECK_THROWS_AS(scan_brackets(p, 1.0, 1.0, 8), error);
  CHECK_THROWS_AS(scan_brackets(p, 2.0, 1.0, 8), error);
  CHECK_THROWS_AS(scan_brackets(p, 1.0, 2.0, 1), error);
  const auto res = scan_brackets(p, 0.5, 2.0, 8);
  CHECK(res.degenerate_c0_zero);
  CHECK(res.brackets.empty());
}

TEST_CASE("scan finds at least six brackets for c0 = 1") {
  ModelParams p;
  p.c0 = 1.0;
  const auto res = scan_brackets(p, 1.0, 12.0, 160);
  CHECK(res.brackets.size() >= 6);
  for (const auto& br : res.brackets) CHECK((br.f_lo > 0) != (br.f_hi > 0));
  // Both residuals change sign inside each of the first brackets.
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& br = res.brackets[i];
    const double a = residual_phi2(p, br.z_lo), b = residual_phi2(p, br.z_hi);
    CHECK((a > 0) != (b > 0));
  }
}

TEST_CASE("refine_root on a synthetic residual") {
  // Root finder sanity, independent of any integration.
  auto res = brent([](double z) { return z - 1.0; }, 0.5, 2.0);
  CHECK(res.converged);
  CHECK(std::abs(res.root - 1.0) < 1e-12);
}

TEST_CASE("refine_root degenerate bracket returns the endpoint") {
  ModelParams p;
  p.c0 = 1.0;
  Bracket br{1.5, 1.5, -0.1, -0.1};
  const auto r = refine_root(p, br);
  CHECK(r.z0_root == 1.5);
}

TEST_CASE("refine_root demands opposite signs") {
  ModelParams p;
  p.c0 = 1.0;
  Bracket br{1.0, 2.0, 0.5, 0.25};
  CHECK_THROWS_AS(refine_root(p, br), error);
}

TEST_CASE("equilibrium roots satisfy both residuals") {
  ModelParams p;
  p.c0 = 1.0;
  const auto entries = find_equilibria(p, 2);
  REQUIRE(entries.size() == 2);
  for (const auto& e : entries) {
    // Both residuals vanish together at a root, below the root tolerance.
    CHECK(std::abs(e.residual_mean_at_root) < 1e-8);
    CHECK(std::abs(e.residual_phi2_at_root) < 1e-8);
    CHECK(e.verification.all_pass);
    CHECK(std::abs(-e.energies.G_R - e.energies.helfrich) < 1e-6);
    CHECK(-e.energies.G_R >= 0.0);
  }
  CHECK(entries[0].z0_root < entries[1].z0_root);
}

TEST_CASE("prefix stability of the equilibrium list") {
  ModelParams p;
  p.c0 = 1.0;
  const auto one = find_equilibria(p, 1);
  const auto two = find_equilibria(p, 2);
  REQUIRE(one.size() == 1);
  REQUIRE(two.size() == 2);
  CHECK(one[0].z0_root == two[0].z0_root);
  CHECK(two[1].z0_root - two[0].z0_root > 1e-6);
}

TEST_CASE("equilibrium heights scale like 1/c0") {
  ModelParams p1, p2;
  p1.c0 = 1.0;
  p2.c0 = 2.0;
  const auto a = find_equilibria(p1, 1);
  const auto b = find_equilibria(p2, 1);
  CHECK(std::abs(a[0].z0_root - 2.0 * b[0].z0_root) < 1e-7);
  CHECK(std::abs(a[0].profile.r_b - 2.0 * b[0].profile.r_b) < 1e-7);
  // -G_R is scale invariant within the family.
  CHECK(std::abs(a[0].energies.G_R - b[0].energies.G_R) < 1e-7);
}

TEST_CASE("find_equilibria rejects invalid requests") {
  ModelParams p;
  CHECK_THROWS_AS(find_equilibria(p, 1), error);  // c0 = 0
  p.c0 = 1.0;
  CHECK_THROWS_AS(find_equilibria(p, 0), error);
  ShootingOptions opts;
  opts.max_octaves = 1;  // no roots inside [0.05, 0.1]
  CHECK_THROWS_AS(find_equilibria(p, 1, opts), error);
}
