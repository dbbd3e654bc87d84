#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plab/calculus.hpp"
#include "plab/grid.hpp"
#include "plab/solver.hpp"

namespace plab {

struct ReportContext {
  double p = 0.0;
  double epsilon = 0.0;
  double h = 0.0;
  double dt = 0.0;
  std::string cutoff_id;
};

/// One named check. pass is always recomputable from (lhs, rhs, tolerance):
/// inequality checks use lhs <= rhs + tolerance, identity checks put the
/// residual magnitude in lhs and 0 in rhs.
struct EstimateReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool pass = false;
  ReportContext context;

  static EstimateReport inequality(std::string name, double lhs, double rhs, double tol,
                                   ReportContext ctx) {
    EstimateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tol;
    r.pass = lhs <= rhs + tol;
    r.context = std::move(ctx);
    return r;
  }
  static EstimateReport identity(std::string name, double residual, double tol,
                                 ReportContext ctx) {
    return inequality(std::move(name), std::abs(residual), 0.0, tol, std::move(ctx));
  }
};

/// The five space-time integrals of the fundamental formula,
/// (I) + (II) = (III) + (IV) + (V).
struct IdentityLedger {
  double term_I = 0.0;
  double term_II = 0.0;
  double term_III = 0.0;
  double term_IV = 0.0;
  double term_V = 0.0;
  ReportContext context;

  double residual() const { return (term_I + term_II) - (term_III + term_IV + term_V); }
};

namespace detail {

inline ReportContext make_context(const SpaceTimeGrid& g, double p, double epsilon,
                                  std::string cutoff_id = "") {
  ReportContext c;
  c.p = p;
  c.epsilon = epsilon;
  c.h = g.h[0];
  c.dt = g.dt;
  c.cutoff_id = std::move(cutoff_id);
  return c;
}

/// Nodal V = |∇u|² + ε² wherever the gradient stencil exists; 0 elsewhere.
inline SpaceTimeField veps_field(const SpaceTimeField& u, double epsilon) {
  const SpaceTimeGrid& g = *u.grid;
  SpaceTimeField V(g);
  const int j_lo = (g.dim == 2) ? 1 : 0;
  const int j_hi = (g.dim == 2) ? g.nx[1] - 2 : 0;
  for (int k = 0; k < g.nt; ++k)
    for (int j = j_lo; j <= j_hi; ++j)
      for (int i = 1; i <= g.nx[0] - 2; ++i)
        V.at(k, i, j) = norm2(gradient(u, k, i, j)) + epsilon * epsilon;
  return V;
}

inline std::string cutoff_id(const CutoffFunction& c) {
  return "bump(r=" + std::to_string(c.space_radius) + ",rho=" + std::to_string(c.time_radius) +
         ")";
}

}  // namespace detail

/// Requires the cutoff's support to keep `cells` grid cells of clearance from
/// the spatial boundary, so every verifier stencil is evaluable where ξ ≠ 0.
inline void require_cutoff_margin(const SpaceTimeGrid& g, const CutoffFunction& c,
                                  int cells = 2) {
  for (int a = 0; a < g.dim; ++a) {
    const double ctr = (a == 0) ? c.space_center.x : c.space_center.y;
    if (ctr - c.space_radius < g.box_lo[a] + cells * g.h[a] ||
        ctr + c.space_radius > g.box_hi[a] - cells * g.h[a])
      throw std::invalid_argument("cutoff support closer than " + std::to_string(cells) +
                                  " cells to the spatial boundary");
  }
}

/// Maximum principle for V = |∇u|² + ε²: the interior max must not exceed the
/// max near the parabolic boundary (initial slice plus boundary-adjacent ring).
inline EstimateReport check_max_principle(const SpaceTimeField& u, double epsilon,
                                          double tolerance) {
  const SpaceTimeGrid& g = *u.grid;
  if (g.nx[0] < 7 || (g.dim == 2 && g.nx[1] < 7) || g.nt < 2)
    throw std::invalid_argument("check_max_principle: grid too coarse");
  double interior_max = 0.0, boundary_max = 0.0;
  bool any_interior = false;
  for (int k = 0; k < g.nt; ++k)
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i) {
        const int m = g.spatial_margin(i, j);
        if (m < 1) continue;
        const double V = norm2(gradient(u, k, i, j)) + epsilon * epsilon;
        const bool boundary_proxy = (k == 0) || (m == 1);
        if (boundary_proxy) {
          boundary_max = std::max(boundary_max, V);
        } else if (k > 0) {  // includes the terminal slice
          interior_max = std::max(interior_max, V);
          any_interior = true;
        }
      }
  if (!any_interior) throw std::invalid_argument("check_max_principle: no interior nodes");
  return EstimateReport::inequality("max_principle", interior_max, boundary_max, tolerance,
                                    detail::make_context(g, 0.0, epsilon));
}

/// Residual of the evolution equation satisfied by V:
///   V_t = ΔV − 2|D²u|² − (p−2)/V² <∇u,∇V>² + (p−2)/V {½|∇V|² + <∇u, D²V ∇u>}.
/// Reports the L² norm of the defect over an interior sub-box.
inline EstimateReport check_veps_evolution(const SpaceTimeField& u, double p, double epsilon,
                                           double tolerance) {
  const SpaceTimeGrid& g = *u.grid;
  if (g.nt < 4 || g.nx[0] < 7 || (g.dim == 2 && g.nx[1] < 7))
    throw std::invalid_argument("check_veps_evolution: grid too coarse");
  const SpaceTimeField V = detail::veps_field(u, epsilon);
  const Region r = Region::interior(g, 2, 1, g.nt - 2);
  const double l2sq = quadrature(g, r, [&](int k, int i, int j) {
    const double Vt = time_derivative(V, k, i, j);
    const Vec2 gu = gradient(u, k, i, j);
    const Sym2 Hu = hessian(u, k, i, j);
    const Vec2 gV = gradient(V, k, i, j);
    const Sym2 HV = hessian(V, k, i, j);
    const double Vn = V.at(k, i, j);
    const double rhs = trace(HV) - 2.0 * frobenius2(Hu) -
                       (p - 2.0) / (Vn * Vn) * dot(gu, gV) * dot(gu, gV) +
                       (p - 2.0) / Vn * (0.5 * norm2(gV) + dot(gu, apply(HV, gu)));
    const double defect = Vt - rhs;
    return defect * defect;
  });
  auto rep = EstimateReport::identity("veps_evolution", std::sqrt(l2sq), tolerance,
                                      detail::make_context(g, p, epsilon));
  return rep;
}

/// Interior gradient bound: on each nested sub-box D the observed sup of |∇u|
/// is compared against ||u||_∞ (1 + dist(D, ∂_par)⁻²); only the functional
/// form is checked, so pass means the implied constants stay within
/// `stability_factor` of each other.
inline EstimateReport check_gradient_interior_bound(const SpaceTimeField& u,
                                                    const std::vector<double>& distances,
                                                    double stability_factor = 10.0) {
  const SpaceTimeGrid& g = *u.grid;
  if (distances.size() < 2)
    throw std::invalid_argument("check_gradient_interior_bound: need >= 2 sub-boxes");
  double u_inf = 0.0;
  for (double v : u.values) u_inf = std::max(u_inf, std::abs(v));
  std::vector<double> constants;
  for (double d : distances) {
    if (!(d > 0.0))
      throw std::invalid_argument("check_gradient_interior_bound: distances must be positive");
    double sup_grad = 0.0;
    bool any = false;
    for (int k = 0; k < g.nt; ++k) {
      if (g.t(k) < d) continue;  // time distance to the initial slice
      for (int j = 0; j < g.nx[1]; ++j)
        for (int i = 0; i < g.nx[0]; ++i) {
          if (g.spatial_margin(i, j) < 1) continue;
          double sd = std::min(g.x(i) - g.box_lo[0], g.box_hi[0] - g.x(i));
          if (g.dim == 2) sd = std::min({sd, g.y(j) - g.box_lo[1], g.box_hi[1] - g.y(j)});
          if (sd < d) continue;
          sup_grad = std::max(sup_grad, std::sqrt(norm2(gradient(u, k, i, j))));
          any = true;
        }
    }
    if (!any)
      throw std::invalid_argument("check_gradient_interior_bound: sub-box contains no nodes");
    const double allowed = u_inf * (1.0 + 1.0 / (d * d));
    constants.push_back(allowed > 0.0 ? sup_grad / allowed : 0.0);
  }
  const double c_max = *std::max_element(constants.begin(), constants.end());
  const double c_min = *std::min_element(constants.begin(), constants.end());
  const double floor = 1e-12;
  const double bound = stability_factor * std::max(c_min, floor);
  return EstimateReport::inequality("gradient_interior_bound", c_max, bound, 0.0,
                                    detail::make_context(g, 0.0, 0.0));
}

/// Miranda–Talenti: ∫∫|Δ(ξf)|² = ∫∫|D²(ξf)|² for the compactly supported
/// product field. Reports the relative residual. Only values of the weight ξ
/// are needed, so any smooth compactly supported weight is accepted; the
/// caller is responsible for keeping its support clear of the boundary.
inline EstimateReport check_miranda_talenti(const SpaceTimeGrid& g, const SpatialFn& f,
                                            const SpaceTimeFn& xi, const std::string& xi_label,
                                            double tolerance) {
  SpaceTimeField prod(g);
  for (int k = 0; k < g.nt; ++k)
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i) {
        const Vec2 x{g.x(i), g.y(j)};
        prod.at(k, i, j) = xi(x, g.t(k)) * f(x);
      }
  const Region r = Region::interior(g, 1);
  const double lhs = quadrature(g, r, [&](int k, int i, int j) {
    const double lap = trace(hessian(prod, k, i, j));
    return lap * lap;
  });
  const double rhs = quadrature(g, r, [&](int k, int i, int j) {
    return frobenius2(hessian(prod, k, i, j));
  });
  const double rel = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
  auto rep = EstimateReport::identity("miranda_talenti", rel, tolerance,
                                      detail::make_context(g, 0.0, 0.0, xi_label));
  rep.lhs = rel;  // relative residual is the checked quantity
  return rep;
}

inline EstimateReport check_miranda_talenti(const SpaceTimeGrid& g, const SpatialFn& f,
                                            const CutoffFunction& cutoff, double tolerance) {
  require_cutoff_margin(g, cutoff, 2);
  return check_miranda_talenti(
      g, f, [&cutoff](Vec2 x, double t) { return cutoff.eval(x, t).xi; },
      detail::cutoff_id(cutoff), tolerance);
}

/// The five terms of the fundamental formula, ∇v in chain-rule mode. No
/// pass/fail at a fixed resolution; convergence of the residual is judged on
/// a refinement sequence by the caller.
inline IdentityLedger fundamental_identity(const SpaceTimeField& u,
                                           const CutoffFunction& cutoff, double p,
                                           double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("fundamental_identity: requires epsilon > 0");
  const SpaceTimeGrid& g = *u.grid;
  require_cutoff_margin(g, cutoff, 2);
  const Region r = Region::interior(g, 2);
  IdentityLedger led;
  led.context = detail::make_context(g, p, epsilon, detail::cutoff_id(cutoff));
  for_region_weighted(g, r, [&](int k, int i, int j, double w) {
    const auto cv = cutoff.eval(Vec2{g.x(i), g.y(j)}, g.t(k));
    if (cv.xi == 0.0 && cv.xi_t == 0.0) return;
    const DerivativeBundle b = derive_bundle(u, k, i, j, epsilon);
    const double xi2 = cv.xi * cv.xi;
    led.term_I += w * xi2 * frobenius2(b.hess);
    led.term_II += w * 0.5 * (p - 2.0) * xi2 * dot(b.grad, b.grad_v) * b.lap / b.V_eps;
    // coefficient 1: -1/2 ∫∫ξ²V_t integrates by parts to +∫∫ξξ_tV
    led.term_III += w * cv.xi * cv.xi_t * b.V_eps;
    led.term_IV += w * (2.0 - p) * cv.xi * dot(b.grad, b.grad_v) * dot(b.grad, cv.grad) / b.V_eps;
    led.term_V += w * (-cv.xi) * dot(b.grad_v, cv.grad);
  });
  return led;
}

/// One entry of an ε-sweep for the second-derivative estimate.
struct SweepEntry {
  double epsilon = 0.0;
  double lhs = 0.0;       // ∫∫ ξ²|D²u|²
  double majorant = 0.0;  // ∫∫_{ξ≠0} (u² + |∇u|²)
  double ratio = 0.0;
};

struct SweepReport {
  EstimateReport report;
  std::vector<SweepEntry> entries;
};

enum class BoundMode { assertion, exploration };

/// ε-uniform second-derivative bound: the ratio ∫∫ξ²|D²u|² over the majorant
/// must show no growth as ε ↓ 0 (last ≤ 1.5 × median). Assertion mode is only
/// available inside the exponent window 6/5 < p < 14/5.
inline SweepReport check_second_derivative_bound(const std::vector<SpaceTimeField>& sweep,
                                                 const std::vector<double>& epsilons,
                                                 const CutoffFunction& cutoff, double p,
                                                 BoundMode mode = BoundMode::assertion) {
  if (mode == BoundMode::assertion && !(p > 6.0 / 5.0 && p < 14.0 / 5.0))
    throw std::invalid_argument(
        "check_second_derivative_bound: assertion mode requires 6/5 < p < 14/5");
  if (sweep.size() != epsilons.size() || sweep.size() < 2)
    throw std::invalid_argument("check_second_derivative_bound: need >= 2 sweep entries");
  SweepReport out;
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    const SpaceTimeField& u = sweep[s];
    const SpaceTimeGrid& g = *u.grid;
    require_cutoff_margin(g, cutoff, 2);
    SweepEntry e;
    e.epsilon = epsilons[s];
    const Region r = Region::interior(g, 2);
    for_region_weighted(g, r, [&](int k, int i, int j, double w) {
      const double xi = cutoff.eval(Vec2{g.x(i), g.y(j)}, g.t(k)).xi;
      if (xi == 0.0) return;
      e.lhs += w * xi * xi * frobenius2(hessian(u, k, i, j));
      const double uv = u.at(k, i, j);
      e.majorant += w * (uv * uv + norm2(gradient(u, k, i, j)));
    });
    e.ratio = e.lhs / std::max(e.majorant, 1e-300);
    out.entries.push_back(e);
  }
  std::vector<double> ratios;
  for (const auto& e : out.entries) ratios.push_back(e.ratio);
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  const std::string name = mode == BoundMode::assertion
                               ? "second_derivative_bound"
                               : "second_derivative_bound(exploration)";
  auto ctx = detail::make_context(*sweep.front().grid, p, epsilons.back(),
                                  detail::cutoff_id(cutoff));
  out.report = EstimateReport::inequality(name, ratios.back(), 1.5 * median, 0.0, ctx);
  if (mode == BoundMode::exploration) out.report.pass = true;  // report-only mode
  return out;
}

/// Time-derivative estimate with explicit constants:
///   ∫∫ ξ²(u_t)² ≤ 4||V||²_∞ { ∫∫|∇ξ|² + (1/p)∫∫ ξ|ξ_t| },  1 < p < 2,
/// ||V||_∞ taken over the support of ξ.
inline EstimateReport check_time_derivative_bound(const SpaceTimeField& u,
                                                  const CutoffFunction& cutoff, double p,
                                                  double epsilon, double tolerance) {
  if (!(p > 1.0 && p < 2.0))
    throw std::invalid_argument("check_time_derivative_bound: requires 1 < p < 2");
  const SpaceTimeGrid& g = *u.grid;
  require_cutoff_margin(g, cutoff, 2);
  const Region r = Region::interior(g, 2);
  double lhs = 0.0;
  double V_sup = 0.0;
  for_region_weighted(g, r, [&](int k, int i, int j, double w) {
    const double xi = cutoff.eval(Vec2{g.x(i), g.y(j)}, g.t(k)).xi;
    if (xi == 0.0) return;
    const double ut = time_derivative(u, k, i, j);
    lhs += w * xi * xi * ut * ut;
    V_sup = std::max(V_sup, norm2(gradient(u, k, i, j)) + epsilon * epsilon);
  });
  const Region full = Region::full(g);
  const double grad_xi_sq = quadrature(g, full, [&](int k, int i, int j) {
    return norm2(cutoff.eval(Vec2{g.x(i), g.y(j)}, g.t(k)).grad);
  });
  const double xi_xit = quadrature(g, full, [&](int k, int i, int j) {
    const auto cv = cutoff.eval(Vec2{g.x(i), g.y(j)}, g.t(k));
    return cv.xi * std::abs(cv.xi_t);
  });
  const double rhs = 4.0 * V_sup * V_sup * (grad_xi_sq + xi_xit / p);
  return EstimateReport::inequality("time_derivative_bound", lhs, rhs, tolerance,
                                    detail::make_context(g, p, epsilon,
                                                         detail::cutoff_id(cutoff)));
}

/// Weak pairing ∫∫ u φ_t = −∫∫ φ U, U the operator field. Residual only; the
/// caller judges decay under refinement.
inline EstimateReport check_weak_time_derivative(const SpaceTimeField& u,
                                                 const CutoffFunction& test_fn, double p,
                                                 double epsilon, double tolerance) {
  const SpaceTimeGrid& g = *u.grid;
  require_cutoff_margin(g, test_fn, 2);
  const Region full = Region::full(g);
  const double lhs = quadrature(g, full, [&](int k, int i, int j) {
    return u.at(k, i, j) * test_fn.eval(Vec2{g.x(i), g.y(j)}, g.t(k)).xi_t;
  });
  const Region r = Region::interior(g, 2);
  const double rhs = -quadrature(g, r, [&](int k, int i, int j) {
    const double xi = test_fn.eval(Vec2{g.x(i), g.y(j)}, g.t(k)).xi;
    if (xi == 0.0) return 0.0;
    const DerivativeBundle b = derive_bundle(u, k, i, j, epsilon);
    return xi * normalized_p_laplacian(b, p, epsilon);
  });
  auto rep = EstimateReport::identity("weak_time_derivative", lhs - rhs, tolerance,
                                      detail::make_context(g, p, epsilon,
                                                           detail::cutoff_id(test_fn)));
  return rep;
}

/// Uniform ε → 0 convergence on a compact subset: sup-norm distances to the
/// smallest-ε run must decrease along the sweep.
inline EstimateReport epsilon_convergence(const std::vector<SpaceTimeField>& sweep,
                                          const std::vector<double>& epsilons,
                                          const Region& compact_subset,
                                          std::vector<double>* diffs_out = nullptr) {
  if (sweep.size() < 3)
    throw std::invalid_argument("epsilon_convergence: need >= 3 solves");
  const SpaceTimeGrid* g0 = sweep.front().grid;
  for (const auto& u : sweep)
    if (u.grid->nx != g0->nx || u.grid->nt != g0->nt || u.grid->dim != g0->dim)
      throw std::invalid_argument("epsilon_convergence: mismatched grids");
  const SpaceTimeField& last = sweep.back();
  std::vector<double> diffs;
  for (std::size_t s = 0; s + 1 < sweep.size(); ++s) {
    double d = 0.0;
    for (int k = compact_subset.k0; k <= compact_subset.k1; ++k)
      for (int j = compact_subset.j0; j <= compact_subset.j1; ++j)
        for (int i = compact_subset.i0; i <= compact_subset.i1; ++i)
          d = std::max(d, std::abs(sweep[s].at(k, i, j) - last.at(k, i, j)));
    diffs.push_back(d);
  }
  bool decreasing = true;
  bool all_zero = true;
  for (std::size_t s = 0; s < diffs.size(); ++s) {
    if (diffs[s] != 0.0) all_zero = false;
    if (s + 1 < diffs.size() && !(diffs[s + 1] < diffs[s])) decreasing = false;
  }
  auto rep = EstimateReport::inequality("epsilon_convergence", diffs.back(), diffs.front(), 0.0,
                                        detail::make_context(*g0, 0.0, epsilons.back()));
  rep.pass = decreasing || all_zero;
  if (diffs_out) *diffs_out = diffs;
  return rep;
}

/// Elementary inequality |∇v|² ≤ 4|D²u|² v. Exact (Cauchy–Schwarz) in
/// chain-rule mode; reports the worst relative violation across the region.
inline EstimateReport check_elementary_inequality(const SpaceTimeField& u, double epsilon,
                                                  GradVMode mode = GradVMode::chain_rule,
                                                  double rel_slack = 1e-12) {
  const SpaceTimeGrid& g = *u.grid;
  const Region r = Region::interior(g, 2);
  if (r.empty()) throw std::invalid_argument("check_elementary_inequality: grid too coarse");
  double worst_rel = 0.0;
  for (int k = r.k0; k <= r.k1; ++k)
    for (int j = r.j0; j <= r.j1; ++j)
      for (int i = r.i0; i <= r.i1; ++i) {
        const DerivativeBundle b = derive_bundle(u, k, i, j, epsilon, mode);
        const double lhs = norm2(b.grad_v);
        const double rhs = 4.0 * frobenius2(b.hess) * b.v_eps;
        worst_rel = std::max(worst_rel, (lhs - rhs) / std::max(rhs, 1e-300));
      }
  return EstimateReport::inequality("elementary_inequality", worst_rel, 0.0, rel_slack,
                                    detail::make_context(g, 0.0, epsilon));
}

}  // namespace plab
