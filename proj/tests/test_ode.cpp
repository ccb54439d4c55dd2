#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rmem/ode.hpp"

using rmem::Dopri5;

TEST_CASE("exponential growth is integrated to tolerance") {
  Dopri5<1>::Options opts;
  opts.rel_tol = opts.abs_tol = 1e-10;
  Dopri5<1> ode([](double, const Dopri5<1>::State& y) { return Dopri5<1>::State{y[0]}; }, opts);
  auto sol = ode.integrate(0.0, {1.0}, 2.0);
  REQUIRE(sol.stop == Dopri5<1>::Stop::ReachedEnd);
  CHECK(std::abs(sol.y_end[0] - std::exp(2.0)) < 1e-9);
}

TEST_CASE("dense output matches the exact flow inside steps") {
  // A wrong interpolant coefficient set would show up as mid-step error far
  // above tolerance, even though the step endpoints stay accurate.
  Dopri5<1>::Options opts;
  opts.rel_tol = opts.abs_tol = 1e-10;
  Dopri5<1> ode([](double, const Dopri5<1>::State& y) { return Dopri5<1>::State{y[0]}; }, opts);
  auto sol = ode.integrate(0.0, {1.0}, 1.0);
  double worst = 0.0;
  for (const auto& st : sol.steps)
    for (int k = 1; k < 8; ++k) {
      const double x = st.x0 + st.h * k / 8.0;
      worst = std::max(worst, std::abs(st.eval(x)[0] - std::exp(x)));
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("fixed-step mode shows fifth-order convergence") {
  auto run = [](double h) {
    Dopri5<2>::Options opts;
    opts.fixed_h = h;
    Dopri5<2> ode(
        [](double, const Dopri5<2>::State& y) {
          return Dopri5<2>::State{y[1], -y[0]};
        },
        opts);
    auto sol = ode.integrate(0.0, {1.0, 0.0}, 1.0);
    return std::abs(sol.y_end[0] - std::cos(1.0));
  };
  const double e1 = run(0.02), e2 = run(0.01);
  const double order = std::log2(e1 / e2);
  CHECK(order > 4.5);
}

TEST_CASE("level landings end steps exactly on the crossing") {
  Dopri5<1>::Options opts;
  opts.rel_tol = opts.abs_tol = 1e-12;
  opts.level_component = 0;
  opts.levels = {0.5, 0.25};
  opts.level_terminal = {false, true};
  Dopri5<1> ode([](double, const Dopri5<1>::State& y) { return Dopri5<1>::State{-y[0]}; }, opts);
  auto sol = ode.integrate(0.0, {1.0}, 10.0);
  REQUIRE(sol.stop == Dopri5<1>::Stop::Event);
  REQUIRE(sol.terminal_level == 1);
  REQUIRE(sol.crossings.size() == 2);
  // y = exp(-t): crossings at t = ln 2 and t = ln 4.
  CHECK(std::abs(sol.crossings[0].x - std::log(2.0)) < 1e-10);
  CHECK(std::abs(sol.x_end - std::log(4.0)) < 1e-10);
  CHECK(std::abs(sol.y_end[0] - 0.25) < 1e-13);
}

TEST_CASE("stop predicate halts the run") {
  Dopri5<1>::Options opts;
  opts.stop_predicate = [](double, const Dopri5<1>::State& y) { return y[0] > 3.0; };
  Dopri5<1> ode([](double, const Dopri5<1>::State& y) { return Dopri5<1>::State{y[0]}; }, opts);
  auto sol = ode.integrate(0.0, {1.0}, 5.0);
  CHECK(sol.stop == Dopri5<1>::Stop::Predicate);
  CHECK(sol.x_end < 5.0);
}
