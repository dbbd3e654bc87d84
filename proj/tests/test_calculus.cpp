#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "plab/calculus.hpp"
#include "plab/grid.hpp"

using namespace plab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SpaceTimeField fill(const SpaceTimeGrid& g, double (*f)(double, double)) {
  SpaceTimeField u(g);
  for (int k = 0; k < g.nt; ++k)
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i) u.at(k, i, j) = f(g.x(i), g.y(j));
  return u;
}

struct Lcg {
  std::uint64_t s = 42;
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(s >> 11) / static_cast<double>(1ull << 53) - 0.5;
  }
};
}  // namespace

TEST_CASE("gradient exact on polynomials of degree <= 2") {
  auto g = build_grid({0.0, 0.0}, {2.0, 0.0}, {9, 1}, 1.0, 2, 1);
  auto u = fill(g, [](double x, double) { return x * x; });
  // f=x² at x=1 -> derivative 2 exactly, any h
  CHECK(gradient(u, 0, 4, 0).x == doctest::Approx(2.0).epsilon(1e-14));

  auto g2 = build_grid({0.0, 0.0}, {1.0, 1.0}, {6, 7}, 1.0, 2, 2);
  auto w = fill(g2, [](double x, double y) { return 3.0 * x + 2.0 * y; });
  for (int j = 1; j < g2.nx[1] - 1; ++j)
    for (int i = 1; i < g2.nx[0] - 1; ++i) {
      const Vec2 gr = gradient(w, 0, i, j);
      CHECK(gr.x == doctest::Approx(3.0).epsilon(1e-13));
      CHECK(gr.y == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("gradient rejects boundary nodes") {
  auto g = build_grid({0.0, 0.0}, {1.0, 0.0}, {5, 1}, 1.0, 2, 1);
  auto u = fill(g, [](double x, double) { return x; });
  CHECK_THROWS_AS(gradient(u, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("gradient second-order rate on sin(pi x)") {
  // Taylor oracle: central difference error ≈ (πh)²/6 · π cos(πx).
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int n = (8 << lvl) + 1;
    auto g = build_grid({0.0, 0.0}, {1.0, 0.0}, {n, 1}, 1.0, 2, 1);
    auto u = fill(g, [](double x, double) { return std::sin(kPi * x); });
    const int i = n / 4;  // x = 0.25
    const double err = std::abs(gradient(u, 0, i, 0).x - kPi * std::cos(kPi * g.x(i)));
    if (lvl > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
  // At x = 0.5 the exact derivative is 0 and the symmetric stencil hits it.
  auto g = build_grid({0.0, 0.0}, {1.0, 0.0}, {9, 1}, 1.0, 2, 1);
  auto u = fill(g, [](double x, double) { return std::sin(kPi * x); });
  CHECK(std::abs(gradient(u, 0, 4, 0).x) < 1e-12);
}

TEST_CASE("hessian exact on quadratics") {
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {7, 7}, 1.0, 2, 2);
  auto uxy = fill(g, [](double x, double y) { return x * y; });
  CHECK(hessian(uxy, 0, 3, 3).xy == doctest::Approx(1.0).epsilon(1e-13));

  auto usad = fill(g, [](double x, double y) { return x * x - y * y; });
  const Sym2 H = hessian(usad, 0, 3, 3);
  CHECK(H.xx == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(H.yy == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(frobenius2(H) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(trace(H) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hessian second-order rate on sin(pi x) sin(pi y)") {
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int n = (8 << lvl) + 1;
    auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {n, n}, 1.0, 2, 2);
    auto u = fill(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    const double err = std::abs(hessian(u, 0, n / 2, n / 2).xx + kPi * kPi);
    if (lvl > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("stencil polynomial exactness property (random quadratics)") {
  Lcg rng;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.next(), b = rng.next(), c = rng.next(), d = rng.next(),
                 e = rng.next(), f0 = rng.next();
    auto poly = [=](double x, double y) {
      return a + b * x + c * y + d * x * x + e * y * y + f0 * x * y;
    };
    auto g = build_grid({-0.5, 0.25}, {1.5, 1.75}, {9, 11}, 1.0, 2, 2);
    SpaceTimeField u(g);
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i) u.at(0, i, j) = poly(g.x(i), g.y(j));
    for (int j = 1; j < g.nx[1] - 1; ++j)
      for (int i = 1; i < g.nx[0] - 1; ++i) {
        const Vec2 gr = gradient(u, 0, i, j);
        const Sym2 H = hessian(u, 0, i, j);
        const double x = g.x(i), y = g.y(j);
        CHECK(std::abs(gr.x - (b + 2 * d * x + f0 * y)) < 1e-12);
        CHECK(std::abs(gr.y - (c + 2 * e * y + f0 * x)) < 1e-12);
        CHECK(std::abs(H.xx - 2 * d) < 1e-12);
        CHECK(std::abs(H.yy - 2 * e) < 1e-12);
        CHECK(std::abs(H.xy - f0) < 1e-12);
      }
  }
}

TEST_CASE("normalized_p_laplacian reductions") {
  auto g = build_grid({0.0, 0.0}, {2.0, 2.0}, {9, 9}, 1.0, 2, 2);

  auto aff = fill(g, [](double x, double y) { return 3.0 * x + 2.0 * y; });
  auto b = derive_bundle(aff, 0, 4, 4, 0.7);
  CHECK(normalized_p_laplacian(b, 3.7, 0.7) == doctest::Approx(0.0).epsilon(1e-12));

  auto rad = fill(g, [](double x, double y) { return x * x + y * y; });
  auto b2 = derive_bundle(rad, 0, 4, 4, 0.5);
  CHECK(normalized_p_laplacian(b2, 2.0, 0.5) == doctest::Approx(4.0).epsilon(1e-12));

  // u = x²−y² at (1,0), p=3, ε=0: Δu=0, ∇u=(2,0), D²u∇u=(4,0), value 1·8/4 = 2.
  auto g3 = build_grid({-1.0, -1.0}, {3.0, 3.0}, {17, 17}, 1.0, 2, 2);
  auto sad = fill(g3, [](double x, double y) { return x * x - y * y; });
  int i1 = 8, j1 = 4;  // node at (1, 0)
  CHECK(g3.x(i1) == doctest::Approx(1.0));
  CHECK(g3.y(j1) == doctest::Approx(0.0));
  auto b3 = derive_bundle(sad, 0, i1, j1, 0.0);
  CHECK(normalized_p_laplacian(b3, 3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("critical-point fallback") {
  auto g = build_grid({-1.0, -1.0}, {1.0, 1.0}, {9, 9}, 1.0, 2, 2);
  auto rad = fill(g, [](double x, double y) { return x * x + y * y; });
  auto b = derive_bundle(rad, 0, 4, 4, 0.0);  // node at the origin, ∇u = 0
  CHECK(b.v_eps < kCriticalPointThreshold);
  CHECK(normalized_p_laplacian(b, 3.0, 0.0) == doctest::Approx(b.lap));  // η = 0 fallback
  CHECK_THROWS_AS(normalized_p_laplacian(b, 3.0, 0.0, false), CriticalPointError);
}

TEST_CASE("derive_bundle invariants and modes") {
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {17, 17}, 1.0, 2, 2);
  auto aff = fill(g, [](double x, double y) { return 1.0 + x - 2.0 * y; });
  for (auto mode : {GradVMode::chain_rule, GradVMode::direct}) {
    auto b = derive_bundle(aff, 0, 8, 8, 0.25, mode);
    CHECK(norm2(b.grad_v) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.V_eps == b.v_eps + 0.25 * 0.25);  // exact
    CHECK(b.lap == trace(b.hess));            // exact
  }

  // u = x²+y²: v = 4r², ∇v = 8(x,y) with |∇v|² = 64 r².
  auto rad = fill(g, [](double x, double y) { return x * x + y * y; });
  auto b = derive_bundle(rad, 0, 12, 8, 0.0);
  const double x = g.x(12), y = g.y(8);
  CHECK(b.grad_v.x == doctest::Approx(8.0 * x).epsilon(1e-12));
  CHECK(b.grad_v.y == doctest::Approx(8.0 * y).epsilon(1e-12));
  CHECK(norm2(b.grad_v) == doctest::Approx(64.0 * (x * x + y * y)).epsilon(1e-12));

  CHECK_THROWS_AS(derive_bundle(rad, 0, 1, 8, 0.0), std::invalid_argument);
}

TEST_CASE("grad_v modes agree to O(h^2) on smooth fields") {
  double prev = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const int n = (8 << lvl) + 1;
    auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {n, n}, 1.0, 2, 2);
    auto u = fill(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    // fixed physical probe (3/8, 5/8), present at every level
    const int i = (n - 1) * 3 / 8, j = (n - 1) * 5 / 8;
    auto bc = derive_bundle(u, 0, i, j, 0.0, GradVMode::chain_rule);
    auto bd = derive_bundle(u, 0, i, j, 0.0, GradVMode::direct);
    const double diff = std::sqrt(norm2(Vec2{bc.grad_v.x - bd.grad_v.x,
                                             bc.grad_v.y - bd.grad_v.y}));
    if (lvl > 0) CHECK(prev / diff == doctest::Approx(4.0).epsilon(0.25));
    prev = diff;
  }
}

TEST_CASE("elementary inequality is exact Cauchy-Schwarz in chain-rule mode") {
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {17, 17}, 1.0, 3, 2);
  SpaceTimeField u(g);
  Lcg rng;
  for (auto& v : u.values) v = rng.next();
  for (int k = 0; k < g.nt; ++k)
    for (int j = 2; j < g.nx[1] - 2; ++j)
      for (int i = 2; i < g.nx[0] - 2; ++i) {
        auto b = derive_bundle(u, k, i, j, 0.1);
        CHECK(norm2(b.grad_v) <= 4.0 * frobenius2(b.hess) * b.v_eps * (1.0 + 1e-12) + 1e-300);
      }
}

TEST_CASE("cutoff: center, support, and closed-form derivatives") {
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {17, 17}, 1.0, 5, 2);
  CutoffFunction cut(g, Vec2{0.5, 0.5}, 0.3, 0.5, 0.3);

  auto center = cut.eval(Vec2{0.5, 0.5}, 0.5);
  CHECK(center.xi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm2(center.grad) == doctest::Approx(0.0));
  CHECK(center.xi_t == doctest::Approx(0.0));

  auto outside = cut.eval(Vec2{0.95, 0.5}, 0.5);
  CHECK(outside.xi == 0.0);
  CHECK(outside.xi_t == 0.0);
  CHECK(norm2(outside.grad) == 0.0);

  // 0 <= ξ <= 1 on a sample sweep
  for (double x = 0.0; x <= 1.0; x += 0.05)
    for (double t = 0.0; t <= 1.0; t += 0.1) {
      const double xi = cut.eval(Vec2{x, 0.45}, t).xi;
      CHECK(xi >= 0.0);
      CHECK(xi <= 1.0);
    }

  CHECK_THROWS_AS(CutoffFunction(g, Vec2{0.5, 0.5}, 0.6, 0.5, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(CutoffFunction(g, Vec2{0.5, 0.5}, 0.3, 0.5, 0.6), std::invalid_argument);
}

TEST_CASE("cutoff derivatives match finite differences at second order") {
  auto g = build_grid({0.0, 0.0}, {1.0, 1.0}, {17, 17}, 1.0, 5, 2);
  CutoffFunction cut(g, Vec2{0.5, 0.5}, 0.3, 0.5, 0.3);
  const Vec2 x{0.42, 0.55};
  const double t = 0.47;
  auto cv = cut.eval(x, t);
  double prev_gx = 0.0, prev_hxx = 0.0, prev_xt = 0.0, prev_hxy = 0.0;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const double h = 0.02 / (1 << lvl);
    const double fd_gx =
        (cut.eval(Vec2{x.x + h, x.y}, t).xi - cut.eval(Vec2{x.x - h, x.y}, t).xi) / (2 * h);
    const double fd_hxx = (cut.eval(Vec2{x.x + h, x.y}, t).xi - 2 * cv.xi +
                           cut.eval(Vec2{x.x - h, x.y}, t).xi) /
                          (h * h);
    const double fd_hxy =
        (cut.eval(Vec2{x.x + h, x.y + h}, t).xi - cut.eval(Vec2{x.x + h, x.y - h}, t).xi -
         cut.eval(Vec2{x.x - h, x.y + h}, t).xi + cut.eval(Vec2{x.x - h, x.y - h}, t).xi) /
        (4 * h * h);
    const double fd_xt = (cut.eval(x, t + h).xi - cut.eval(x, t - h).xi) / (2 * h);
    const double e_gx = std::abs(fd_gx - cv.grad.x);
    const double e_hxx = std::abs(fd_hxx - cv.hess.xx);
    const double e_hxy = std::abs(fd_hxy - cv.hess.xy);
    const double e_xt = std::abs(fd_xt - cv.xi_t);
    if (lvl > 0) {
      CHECK(prev_gx / e_gx == doctest::Approx(4.0).epsilon(0.15));
      CHECK(prev_hxx / e_hxx == doctest::Approx(4.0).epsilon(0.15));
      CHECK(prev_hxy / e_hxy == doctest::Approx(4.0).epsilon(0.15));
      CHECK(prev_xt / e_xt == doctest::Approx(4.0).epsilon(0.15));
    }
    prev_gx = e_gx;
    prev_hxx = e_hxx;
    prev_hxy = e_hxy;
    prev_xt = e_xt;
  }
}
