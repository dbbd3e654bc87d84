#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "plab/calculus.hpp"
#include "plab/grid.hpp"
#include "plab/params.hpp"

namespace plab {

using SpatialFn = std::function<double(Vec2)>;
using SpaceTimeFn = std::function<double(Vec2, double)>;

/// Initial data, Dirichlet lateral data, optional manufactured forcing.
struct ProblemData {
  SpatialFn initial;
  SpaceTimeFn lateral;
  std::optional<SpaceTimeFn> forcing;
  Params params;
};

struct BlowUpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Explicit-Euler stability bound. The diffusion coefficient of the expanded
/// operator is at most max(1, p-1) per axis.
inline double cfl_dt(const Params& params, const SpaceTimeGrid& grid) {
  double h_min = grid.h[0];
  if (grid.dim == 2) h_min = std::min(h_min, grid.h[1]);
  return 0.9 * h_min * h_min / (2.0 * grid.dim * std::max(1.0, params.p - 1.0));
}

namespace detail {

inline double operator_at(const SpaceTimeField& u, int k, int i, int j, const Params& pr) {
  const SpaceTimeGrid& g = *u.grid;
  DerivativeBundle b;
  b.grad = gradient(u, k, i, j);
  b.hess = hessian(u, k, i, j);
  b.lap = trace(b.hess);
  b.v_eps = norm2(b.grad);
  b.V_eps = b.v_eps + pr.epsilon * pr.epsilon;
  try {
    return normalized_p_laplacian(b, pr.p, pr.epsilon);
  } catch (const CriticalPointError& e) {
    throw CriticalPointError(std::string(e.what()) + " at node (t=" + std::to_string(g.t(k)) +
                             ", x=" + std::to_string(g.x(i)) + ", y=" + std::to_string(g.y(j)) +
                             ")");
  }
}

}  // namespace detail

/// One forward-Euler step: interior nodes advance by dt·(operator + forcing),
/// lateral nodes are overwritten with the Dirichlet data at t + dt.
inline void step_explicit(SpaceTimeField& u, int k, const ProblemData& data) {
  const SpaceTimeGrid& g = *u.grid;
  const double t_next = g.t(k + 1);
  const int j_lo = (g.dim == 2) ? 1 : 0;
  const int j_hi = (g.dim == 2) ? g.nx[1] - 2 : 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = 1; i <= g.nx[0] - 2; ++i) {
      double rate = detail::operator_at(u, k, i, j, data.params);
      if (data.forcing) rate += (*data.forcing)(Vec2{g.x(i), g.y(j)}, g.t(k));
      u.at(k + 1, i, j) = u.at(k, i, j) + g.dt * rate;
    }
  }
  for (int j = 0; j < g.nx[1]; ++j)
    for (int i = 0; i < g.nx[0]; ++i)
      if (g.spatial_margin(i, j) == 0) u.at(k + 1, i, j) = data.lateral(Vec2{g.x(i), g.y(j)}, t_next);
  for (int j = 0; j < g.nx[1]; ++j)
    for (int i = 0; i < g.nx[0]; ++i)
      if (!std::isfinite(u.at(k + 1, i, j)))
        throw BlowUpError("step_explicit: non-finite value after step " + std::to_string(k + 1));
}

/// Full forward solve of the regularized flow. Deterministic: identical
/// inputs give bit-identical histories.
inline SpaceTimeField solve(const ProblemData& data, const SpaceTimeGrid& grid) {
  data.params.validate();
  if (grid.dim != data.params.dim)
    throw std::invalid_argument("solve: grid and params dimension mismatch");
  const double dt_max = cfl_dt(data.params, grid);
  if (grid.dt > dt_max * (1.0 + 1e-12))
    throw std::invalid_argument("solve: dt=" + std::to_string(grid.dt) +
                                " violates CFL bound " + std::to_string(dt_max));
  SpaceTimeField u(grid);
  for (int j = 0; j < grid.nx[1]; ++j)
    for (int i = 0; i < grid.nx[0]; ++i) {
      const Vec2 x{grid.x(i), grid.y(j)};
      u.at(0, i, j) = data.initial(x);
      if (grid.spatial_margin(i, j) == 0) {
        const double lat = data.lateral(x, 0.0);
        const double scale = std::max({1.0, std::abs(lat), std::abs(u.at(0, i, j))});
        if (std::abs(lat - u.at(0, i, j)) > 1e-12 * scale)
          throw std::invalid_argument("solve: initial and lateral data disagree at t=0 corner");
      }
    }
  for (int k = 0; k + 1 < grid.nt; ++k) step_explicit(u, k, data);
  return u;
}

/// Number of time slices so that dt = T/(nt-1) respects the CFL bound.
inline int cfl_nt(const Params& params, const SpaceTimeGrid& grid_without_time) {
  const double dt_max = cfl_dt(params, grid_without_time);
  return static_cast<int>(std::ceil(grid_without_time.horizon_T / dt_max)) + 1;
}

/// Closed-form manufactured solution: value plus all derivatives the operator
/// needs, so the induced forcing is exact (never differenced).
struct ManufacturedSolution {
  SpaceTimeFn value;
  SpaceTimeFn time_deriv;
  std::function<Vec2(Vec2, double)> grad;
  std::function<Sym2(Vec2, double)> hess;
  std::string description;
};

/// f = u*_t − Δ_p^N u*, from the closed forms. Solving with this forcing and
/// matching initial/lateral data reproduces u* up to discretization error.
inline SpaceTimeFn mms_forcing(const ManufacturedSolution& ref, const Params& params) {
  return [ref, params](Vec2 x, double t) {
    DerivativeBundle b;
    b.grad = ref.grad(x, t);
    b.hess = ref.hess(x, t);
    b.lap = trace(b.hess);
    b.v_eps = norm2(b.grad);
    b.V_eps = b.v_eps + params.epsilon * params.epsilon;
    if (params.epsilon == 0.0 && b.v_eps < kCriticalPointThreshold)
      throw std::invalid_argument("mms_forcing: manufactured gradient vanishes with epsilon = 0");
    return ref.time_deriv(x, t) - normalized_p_laplacian(b, params.p, params.epsilon);
  };
}

/// Time derivative of a solved field by central differences, one-sided at the
/// ends.
inline double time_derivative(const SpaceTimeField& u, int k, int i, int j) {
  const SpaceTimeGrid& g = *u.grid;
  if (k == 0) return (u.at(1, i, j) - u.at(0, i, j)) / g.dt;
  if (k == g.nt - 1) return (u.at(k, i, j) - u.at(k - 1, i, j)) / g.dt;
  return (u.at(k + 1, i, j) - u.at(k - 1, i, j)) / (2.0 * g.dt);
}

}  // namespace plab
