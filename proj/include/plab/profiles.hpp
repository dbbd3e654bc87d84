#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plab/references.hpp"
#include "plab/solver.hpp"

namespace plab {

/// A named initial/lateral data pair, with an exact solution when one exists
/// for the requested parameters.
struct Profile {
  std::string name;
  int dim = 1;
  SpatialFn initial;
  SpaceTimeFn lateral;
  std::optional<ReferenceSolution> exact;  // populated per-Params by make_profile
};

inline const std::vector<std::string>& profile_names() {
  static const std::vector<std::string> names = {"constant", "affine", "sine-mode-1d",
                                                 "sine-product-2d", "radial-quadratic"};
  return names;
}

inline Profile make_profile(const std::string& name, const Params& params) {
  constexpr double pi = 3.14159265358979323846;
  Profile pr;
  pr.name = name;
  pr.dim = params.dim;
  if (name == "constant") {
    pr.initial = [](Vec2) { return 1.0; };
    pr.lateral = [](Vec2, double) { return 1.0; };
    ReferenceSolution ref;
    ref.evaluator = [](Vec2, double) { return 1.0; };
    ref.description = "constant 1";
    ref.valid_params = [](const Params&) { return true; };
    pr.exact = ref;
  } else if (name == "affine") {
    auto f = [dim = params.dim](Vec2 x) {
      return 0.3 + 1.5 * x.x + (dim == 2 ? 0.7 * x.y : 0.0);
    };
    pr.initial = f;
    pr.lateral = [f](Vec2 x, double) { return f(x); };
    ReferenceSolution ref;
    ref.evaluator = [f](Vec2 x, double) { return f(x); };
    ref.description = "stationary affine";
    ref.valid_params = [](const Params&) { return true; };
    pr.exact = ref;
  } else if (name == "sine-mode-1d") {
    if (params.dim != 1) throw std::invalid_argument("profile sine-mode-1d requires dim = 1");
    pr.initial = [pi](Vec2 x) { return std::sin(pi * x.x); };
    auto ref = exact_1d_mode(pi, params.p);
    // Lateral data from the exact mode, so the profile also works on boxes
    // whose endpoints are not zeros of sin(πx).
    pr.lateral = [ev = ref.evaluator](Vec2 x, double t) { return ev(x, t); };
    if (params.epsilon == 0.0) pr.exact = ref;
  } else if (name == "sine-product-2d") {
    if (params.dim != 2) throw std::invalid_argument("profile sine-product-2d requires dim = 2");
    pr.initial = [pi](Vec2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    pr.lateral = [](Vec2, double) { return 0.0; };
    if (params.p == 2.0) {
      ReferenceSolution ref;
      ref.evaluator = [pi](Vec2 x, double t) {
        return std::exp(-2.0 * pi * pi * t) * std::sin(pi * x.x) * std::sin(pi * x.y);
      };
      ref.description = "2D heat product mode (p = 2)";
      ref.valid_params = [](const Params& q) { return q.p == 2.0 && q.dim == 2; };
      pr.exact = ref;
    }
  } else if (name == "radial-quadratic") {
    auto f = [dim = params.dim](Vec2 x) { return x.x * x.x + (dim == 2 ? x.y * x.y : 0.0); };
    pr.initial = f;
    pr.lateral = [f](Vec2 x, double) { return f(x); };
  } else {
    throw std::invalid_argument("unknown profile: " + name);
  }
  return pr;
}

/// Manufactured solutions for MMS convergence studies.
inline ManufacturedSolution make_manufactured(const std::string& name, int dim) {
  constexpr double pi = 3.14159265358979323846;
  ManufacturedSolution m;
  if (name == "sine-decay") {
    // u* = e^{-t} sin(πx) (·sin(πy) in 2D)
    m.description = "exp(-t) sine mode";
    if (dim == 1) {
      m.value = [pi](Vec2 x, double t) { return std::exp(-t) * std::sin(pi * x.x); };
      m.time_deriv = [pi](Vec2 x, double t) { return -std::exp(-t) * std::sin(pi * x.x); };
      m.grad = [pi](Vec2 x, double t) {
        return Vec2{std::exp(-t) * pi * std::cos(pi * x.x), 0.0};
      };
      m.hess = [pi](Vec2 x, double t) {
        Sym2 h;
        h.xx = -std::exp(-t) * pi * pi * std::sin(pi * x.x);
        return h;
      };
    } else {
      m.value = [pi](Vec2 x, double t) {
        return std::exp(-t) * std::sin(pi * x.x) * std::sin(pi * x.y);
      };
      m.time_deriv = [pi](Vec2 x, double t) {
        return -std::exp(-t) * std::sin(pi * x.x) * std::sin(pi * x.y);
      };
      m.grad = [pi](Vec2 x, double t) {
        const double e = std::exp(-t);
        return Vec2{e * pi * std::cos(pi * x.x) * std::sin(pi * x.y),
                    e * pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
      };
      m.hess = [pi](Vec2 x, double t) {
        const double e = std::exp(-t);
        Sym2 h;
        h.xx = -e * pi * pi * std::sin(pi * x.x) * std::sin(pi * x.y);
        h.yy = h.xx;
        h.xy = e * pi * pi * std::cos(pi * x.x) * std::cos(pi * x.y);
        return h;
      };
    }
  } else if (name == "drifting-saddle") {
    // u* = x² − y² + t: harmonic in space, gradient nonvanishing off the origin.
    if (dim != 2) throw std::invalid_argument("manufactured drifting-saddle requires dim = 2");
    m.description = "x^2 - y^2 + t";
    m.value = [](Vec2 x, double t) { return x.x * x.x - x.y * x.y + t; };
    m.time_deriv = [](Vec2, double) { return 1.0; };
    m.grad = [](Vec2 x, double) { return Vec2{2.0 * x.x, -2.0 * x.y}; };
    m.hess = [](Vec2, double) {
      Sym2 h;
      h.xx = 2.0;
      h.yy = -2.0;
      return h;
    };
  } else {
    throw std::invalid_argument("unknown manufactured solution: " + name);
  }
  return m;
}

}  // namespace plab
