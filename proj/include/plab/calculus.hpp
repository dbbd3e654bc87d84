#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "plab/grid.hpp"

namespace plab {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// Symmetric 2x2 matrix; in 1D only xx is populated.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline Vec2 apply(const Sym2& m, const Vec2& v) {
  return Vec2{m.xx * v.x + m.xy * v.y, m.xy * v.x + m.yy * v.y};
}
inline double trace(const Sym2& m) { return m.xx + m.yy; }
inline double frobenius2(const Sym2& m) { return m.xx * m.xx + 2.0 * m.xy * m.xy + m.yy * m.yy; }

/// Central-difference gradient, O(h²); needs one cell of margin.
inline Vec2 gradient(const SpaceTimeField& u, int k, int i, int j) {
  const SpaceTimeGrid& g = *u.grid;
  if (g.spatial_margin(i, j) < 1)
    throw std::invalid_argument("gradient: node on or outside spatial boundary");
  Vec2 out;
  out.x = (u.at(k, i + 1, j) - u.at(k, i - 1, j)) / (2.0 * g.h[0]);
  if (g.dim == 2) out.y = (u.at(k, i, j + 1) - u.at(k, i, j - 1)) / (2.0 * g.h[1]);
  return out;
}

/// Second central differences on the diagonal, 4-point cross stencil for the
/// mixed entry. Exact on quadratics.
inline Sym2 hessian(const SpaceTimeField& u, int k, int i, int j) {
  const SpaceTimeGrid& g = *u.grid;
  if (g.spatial_margin(i, j) < 1)
    throw std::invalid_argument("hessian: node on or outside spatial boundary");
  Sym2 out;
  out.xx = (u.at(k, i + 1, j) - 2.0 * u.at(k, i, j) + u.at(k, i - 1, j)) / (g.h[0] * g.h[0]);
  if (g.dim == 2) {
    out.yy = (u.at(k, i, j + 1) - 2.0 * u.at(k, i, j) + u.at(k, i, j - 1)) / (g.h[1] * g.h[1]);
    out.xy = (u.at(k, i + 1, j + 1) - u.at(k, i + 1, j - 1) - u.at(k, i - 1, j + 1) +
              u.at(k, i - 1, j - 1)) /
             (4.0 * g.h[0] * g.h[1]);
  }
  return out;
}

/// Per-node differential objects of the flow: ∇u, D²u, Δu,
/// v = |∇u|², V = v + ε², and ∇v.
struct DerivativeBundle {
  Vec2 grad;
  Sym2 hess;
  double lap = 0.0;
  double v_eps = 0.0;
  double V_eps = 0.0;
  Vec2 grad_v;
};

/// How ∇v is produced: chain rule 2·D²u·∇u (respects the integral identity's
/// algebra exactly at nodes), or central differences of the nodal field v.
enum class GradVMode { chain_rule, direct };

/// Squared-gradient threshold below which an ε = 0 evaluation is treated as a
/// critical point (η = 0 fallback).
inline constexpr double kCriticalPointThreshold = 1e-12;

struct CriticalPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Δu + (p-2)·<∇u, D²u ∇u> / (|∇u|² + ε²). At a critical point with ε = 0 the
/// fallback returns Δu (admissible choice η = 0).
inline double normalized_p_laplacian(const DerivativeBundle& b, double p, double epsilon,
                                     bool fallback_enabled = true) {
  if (epsilon == 0.0 && b.v_eps < kCriticalPointThreshold) {
    if (!fallback_enabled)
      throw CriticalPointError("normalized_p_laplacian: vanishing gradient with epsilon = 0");
    return b.lap;
  }
  const double correction = dot(b.grad, apply(b.hess, b.grad));
  return b.lap + (p - 2.0) * correction / b.V_eps;
}

inline DerivativeBundle derive_bundle(const SpaceTimeField& u, int k, int i, int j,
                                      double epsilon, GradVMode mode = GradVMode::chain_rule) {
  const SpaceTimeGrid& g = *u.grid;
  if (g.spatial_margin(i, j) < 2)
    throw std::invalid_argument("derive_bundle: node closer than 2 cells to boundary");
  DerivativeBundle b;
  b.grad = gradient(u, k, i, j);
  b.hess = hessian(u, k, i, j);
  b.lap = trace(b.hess);
  b.v_eps = norm2(b.grad);
  b.V_eps = b.v_eps + epsilon * epsilon;
  if (mode == GradVMode::chain_rule) {
    Vec2 hg = apply(b.hess, b.grad);
    b.grad_v = Vec2{2.0 * hg.x, 2.0 * hg.y};
  } else {
    auto v_at = [&](int ii, int jj) { return norm2(gradient(u, k, ii, jj)); };
    b.grad_v.x = (v_at(i + 1, j) - v_at(i - 1, j)) / (2.0 * g.h[0]);
    if (g.dim == 2) b.grad_v.y = (v_at(i, j + 1) - v_at(i, j - 1)) / (2.0 * g.h[1]);
  }
  return b;
}

/// Compactly supported bump ξ(x,t) = B(|x-c|²/r²)·B((t-t_c)²/ρ²) with
/// B(s) = exp(1 - 1/(1-s)) for s < 1, else 0. All derivatives closed-form.
struct CutoffFunction {
  Vec2 space_center;
  double space_radius = 0.0;
  double time_center = 0.0;
  double time_radius = 0.0;
  int dim = 2;

  struct Value {
    double xi = 0.0;
    Vec2 grad;
    Sym2 hess;
    double xi_t = 0.0;
  };

  /// Construction validates that the closed support lies strictly inside
  /// Ω × (0,T).
  CutoffFunction(const SpaceTimeGrid& g, Vec2 center, double radius, double t_center,
                 double t_radius)
      : space_center(center),
        space_radius(radius),
        time_center(t_center),
        time_radius(t_radius),
        dim(g.dim) {
    if (!(radius > 0.0) || !(t_radius > 0.0))
      throw std::invalid_argument("CutoffFunction: radii must be positive");
    for (int a = 0; a < g.dim; ++a) {
      const double c = (a == 0) ? center.x : center.y;
      if (!(c - radius > g.box_lo[a]) || !(c + radius < g.box_hi[a]))
        throw std::invalid_argument(
            "CutoffFunction: spatial support not strictly inside the box (axis " +
            std::to_string(a) + ")");
    }
    if (!(t_center - t_radius > 0.0) || !(t_center + t_radius < g.horizon_T))
      throw std::invalid_argument("CutoffFunction: time support not strictly inside (0,T)");
  }

  Value eval(Vec2 x, double t) const {
    Value out;
    const double sx = space_arg(x);
    const double st = time_arg(t);
    const auto [bx, bx1, bx2] = bump(sx);
    const auto [bt, bt1, bt2] = bump(st);
    if (bx == 0.0 || bt == 0.0) return out;
    out.xi = bx * bt;

    const double inv_r2 = 1.0 / (space_radius * space_radius);
    Vec2 ds{2.0 * (x.x - space_center.x) * inv_r2, 0.0};
    if (dim == 2) ds.y = 2.0 * (x.y - space_center.y) * inv_r2;
    out.grad.x = bt * bx1 * ds.x;
    out.grad.y = bt * bx1 * ds.y;
    out.hess.xx = bt * (bx2 * ds.x * ds.x + bx1 * 2.0 * inv_r2);
    if (dim == 2) {
      out.hess.yy = bt * (bx2 * ds.y * ds.y + bx1 * 2.0 * inv_r2);
      out.hess.xy = bt * bx2 * ds.x * ds.y;
    }
    const double dst = 2.0 * (t - time_center) / (time_radius * time_radius);
    out.xi_t = bx * bt1 * dst;
    return out;
  }

 private:
  double space_arg(Vec2 x) const {
    const double dx = x.x - space_center.x;
    const double dy = (dim == 2) ? x.y - space_center.y : 0.0;
    return (dx * dx + dy * dy) / (space_radius * space_radius);
  }
  double time_arg(double t) const {
    const double d = t - time_center;
    return d * d / (time_radius * time_radius);
  }
  // Returns (B, B', B''). Near s = 1 the bump underflows to zero before the
  // rational factors overflow; the guard keeps the quotient well-defined.
  static std::tuple<double, double, double> bump(double s) {
    if (s >= 1.0 - 1e-8) return {0.0, 0.0, 0.0};
    const double q = 1.0 / (1.0 - s);
    const double b = std::exp(1.0 - q);
    const double b1 = -b * q * q;
    const double b2 = b * q * q * q * (q - 2.0);
    return {b, b1, b2};
  }
};

}  // namespace plab
