#include <doctest.h>

#include <cmath>

#include "plab/profiles.hpp"
#include "plab/references.hpp"
#include "plab/solver.hpp"

using namespace plab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SpaceTimeGrid sine_grid_1d(int nx, double T, const Params& pr) {
  SpaceTimeGrid probe = build_grid({0.0, 0.0}, {1.0, 0.0}, {nx, 1}, T, 2, 1);
  return build_grid({0.0, 0.0}, {1.0, 0.0}, {nx, 1}, T, cfl_nt(pr, probe), 1);
}
}  // namespace

TEST_CASE("cfl_dt formula") {
  Params p1{2.0, 0.0, 1, 1.0};
  auto g1 = build_grid({0.0, 0.0}, {1.0, 0.0}, {11, 1}, 1.0, 2, 1);
  CHECK(cfl_dt(p1, g1) == doctest::Approx(0.0045).epsilon(1e-12));

  Params p2{3.0, 0.0, 2, 1.0};
  auto g2 = build_grid({0.0, 0.0}, {1.0, 1.0}, {11, 11}, 1.0, 2, 2);
  CHECK(cfl_dt(p2, g2) == doctest::Approx(0.001125).epsilon(1e-12));

  Params p15{1.5, 0.0, 1, 1.0};
  Params p20{2.0, 0.0, 1, 1.0};
  CHECK(cfl_dt(p15, g1) == cfl_dt(p20, g1));  // max(1, p-1) = 1 for both
}

TEST_CASE("affine data is an exact fixed point") {
  Params pr{2.6, 0.3, 2, 0.01};
  auto probe = build_grid({0.0, 0.0}, {1.0, 1.0}, {9, 9}, pr.horizon_T, 2, 2);
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {9, 9}, pr.horizon_T, cfl_nt(pr, probe), 2);
  auto prof = make_profile("affine", pr);
  ProblemData data{prof.initial, prof.lateral, std::nullopt, pr};
  auto u = solve(data, g);
  for (int k = 1; k < g.nt; ++k)
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i) CHECK(u.at(k, i, j) == u.at(0, i, j));
}

TEST_CASE("constant data stays constant") {
  Params pr{1.4, 0.0, 1, 0.05};
  auto g = sine_grid_1d(9, pr.horizon_T, pr);
  ProblemData data{[](Vec2) { return 2.5; }, [](Vec2, double) { return 2.5; }, std::nullopt, pr};
  auto u = solve(data, g);
  for (double v : u.values) CHECK(v == 2.5);
}

TEST_CASE("p=2 solve is independent of epsilon, slice by slice") {
  for (int dim : {1, 2}) {
    Params pr{2.0, 0.0, dim, 0.02};
    std::array<int, 2> nx{17, dim == 2 ? 17 : 1};
    auto probe = build_grid({0.0, 0.0}, {1.0, dim == 2 ? 1.0 : 0.0}, nx, pr.horizon_T, 2, dim);
    auto g = build_grid({0.0, 0.0}, {1.0, dim == 2 ? 1.0 : 0.0}, nx, pr.horizon_T,
                        cfl_nt(pr, probe), dim);
    auto prof = make_profile(dim == 1 ? "sine-mode-1d" : "sine-product-2d", pr);
    ProblemData d0{prof.initial, prof.lateral, std::nullopt, pr};
    Params pr_eps = pr;
    pr_eps.epsilon = 0.3;
    ProblemData d1{prof.initial, prof.lateral, std::nullopt, pr_eps};
    auto u0 = solve(d0, g);
    auto u1 = solve(d1, g);
    CHECK(u0.values == u1.values);  // bit-identical
  }
}

TEST_CASE("determinism: identical inputs, identical history") {
  Params pr{1.5, 0.05, 1, 0.02};
  auto g = sine_grid_1d(17, pr.horizon_T, pr);
  auto prof = make_profile("sine-mode-1d", pr);
  ProblemData data{prof.initial, prof.lateral, std::nullopt, pr};
  auto a = solve(data, g);
  auto b = solve(data, g);
  CHECK(a.values == b.values);
}

TEST_CASE("one explicit step matches u + dt (p-1) u_xx") {
  Params pr{1.5, 0.0, 1, 0.05};
  auto g = sine_grid_1d(65, pr.horizon_T, pr);
  auto prof = make_profile("sine-mode-1d", pr);
  ProblemData data{prof.initial, prof.lateral, std::nullopt, pr};
  SpaceTimeField u(g);
  for (int i = 0; i < g.nx[0]; ++i) u.at(0, i, 0) = std::sin(kPi * g.x(i));
  step_explicit(u, 0, data);
  for (int i = 2; i < g.nx[0] - 2; ++i) {
    if (std::abs(g.x(i) - 0.5) < 2.0 * g.h[0]) continue;  // critical line of sin(πx)
    const double expected =
        u.at(0, i, 0) + g.dt * (pr.p - 1.0) * (-kPi * kPi * std::sin(kPi * g.x(i)));
    // stencil error: dt · (p−1) · O(h²)
    CHECK(std::abs(u.at(1, i, 0) - expected) < 50.0 * g.dt * g.h[0] * g.h[0]);
  }
}

TEST_CASE("1D exact-mode convergence at second order") {
  Params pr{1.5, 0.0, 1, 0.05};
  auto exact = exact_1d_mode(kPi, pr.p);
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int nx = (16 << lvl) + 1;
    // Offset box so no node sits on the critical line x = 0.5.
    auto probe = build_grid({0.05, 0.0}, {1.05, 0.0}, {nx, 1}, pr.horizon_T, 2, 1);
    auto g = build_grid({0.05, 0.0}, {1.05, 0.0}, {nx, 1}, pr.horizon_T, cfl_nt(pr, probe), 1);
    ProblemData data{[&](Vec2 x) { return exact.evaluator(x, 0.0); },
                     [&](Vec2 x, double t) { return exact.evaluator(x, t); }, std::nullopt, pr};
    auto u = solve(data, g);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
      for (int i = 0; i < g.nx[0]; ++i)
        err = std::max(err, std::abs(u.at(k, i, 0) - exact.evaluator(Vec2{g.x(i), 0.0}, g.t(k))));
    if (lvl > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.3));
    prev = err;
  }
}

TEST_CASE("2D heat product solution at second order (p=2)") {
  Params pr{2.0, 0.0, 2, 0.02};
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int nx = (8 << lvl) + 1;
    auto probe = build_grid({0.0, 0.0}, {1.0, 1.0}, {nx, nx}, pr.horizon_T, 2, 2);
    auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {nx, nx}, pr.horizon_T, cfl_nt(pr, probe), 2);
    auto prof = make_profile("sine-product-2d", pr);
    ProblemData data{prof.initial, prof.lateral, std::nullopt, pr};
    auto u = solve(data, g);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
      for (int j = 0; j < g.nx[1]; ++j)
        for (int i = 0; i < g.nx[0]; ++i)
          err = std::max(err, std::abs(u.at(k, i, j) -
                                       prof.exact->evaluator(Vec2{g.x(i), g.y(j)}, g.t(k))));
    if (lvl > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.3));
    prev = err;
  }
}

TEST_CASE("solve rejects CFL violations and inconsistent data") {
  Params pr{2.0, 0.0, 1, 1.0};
  auto g = build_grid({0.0, 0.0}, {1.0, 0.0}, {17, 1}, 1.0, 5, 1);  // dt = 0.25, way too big
  auto prof = make_profile("sine-mode-1d", pr);
  ProblemData data{prof.initial, prof.lateral, std::nullopt, pr};
  CHECK_THROWS_WITH_AS(solve(data, g), doctest::Contains("CFL"), std::invalid_argument);

  auto g2 = sine_grid_1d(17, 0.01, pr);
  ProblemData bad{[](Vec2) { return 1.0; }, [](Vec2, double) { return 0.0; }, std::nullopt, pr};
  CHECK_THROWS_WITH_AS(solve(bad, g2), doctest::Contains("disagree"), std::invalid_argument);
}

TEST_CASE("blow-up is detected with the step index") {
  Params pr{2.0, 0.0, 1, 0.01};
  auto g = sine_grid_1d(9, pr.horizon_T, pr);
  ProblemData data{[](Vec2) { return 0.0; }, [](Vec2, double) { return 0.0; },
                   [](Vec2, double) { return 1e308; }, pr};
  CHECK_THROWS_AS(solve(data, g), BlowUpError);
}

TEST_CASE("mms_forcing vanishes on an exact solution") {
  const double p = 1.7;
  Params pr{p, 0.0, 1, 0.1};
  auto exact = exact_1d_mode(kPi, p);
  ManufacturedSolution m;
  m.value = exact.evaluator;
  m.time_deriv = [p](Vec2 x, double t) {
    return -(p - 1.0) * kPi * kPi * std::exp(-(p - 1.0) * kPi * kPi * t) * std::sin(kPi * x.x);
  };
  m.grad = [p](Vec2 x, double t) {
    return Vec2{kPi * std::exp(-(p - 1.0) * kPi * kPi * t) * std::cos(kPi * x.x), 0.0};
  };
  m.hess = [p](Vec2 x, double t) {
    Sym2 h;
    h.xx = -kPi * kPi * std::exp(-(p - 1.0) * kPi * kPi * t) * std::sin(kPi * x.x);
    return h;
  };
  auto f = mms_forcing(m, pr);
  for (double x : {0.1, 0.3, 0.7, 0.9})
    CHECK(std::abs(f(Vec2{x, 0.0}, 0.03)) < 1e-12);
  // vanishing manufactured gradient with ε=0 is rejected
  CHECK_THROWS_AS(f(Vec2{0.5, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("mms_forcing symbolic value for the drifting saddle") {
  // u* = x²−y²+t, p=3, ε=0: f = 1 − 2(x²−y²)/(x²+y²).
  Params pr{3.0, 0.0, 2, 0.1};
  auto m = make_manufactured("drifting-saddle", 2);
  auto f = mms_forcing(m, pr);
  CHECK(f(Vec2{1.0, 0.0}, 0.2) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(f(Vec2{0.6, 0.8}, 0.0) ==
        doctest::Approx(1.0 - 2.0 * (0.36 - 0.64) / 1.0).epsilon(1e-13));
}

TEST_CASE("MMS solve converges at second order") {
  Params pr{1.5, 0.2, 1, 0.05};
  auto m = make_manufactured("sine-decay", 1);
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int nx = (16 << lvl) + 1;
    auto probe = build_grid({0.0, 0.0}, {1.0, 0.0}, {nx, 1}, pr.horizon_T, 2, 1);
    auto g = build_grid({0.0, 0.0}, {1.0, 0.0}, {nx, 1}, pr.horizon_T, cfl_nt(pr, probe), 1);
    ProblemData data;
    data.params = pr;
    data.initial = [&](Vec2 x) { return m.value(x, 0.0); };
    data.lateral = [&](Vec2 x, double t) { return m.value(x, t); };
    data.forcing = mms_forcing(m, pr);
    auto u = solve(data, g);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
      for (int i = 0; i < g.nx[0]; ++i)
        err = std::max(err, std::abs(u.at(k, i, 0) - m.value(Vec2{g.x(i), 0.0}, g.t(k))));
    if (lvl > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.3));
    prev = err;
  }
}
