#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace plab {

/// Node classes. The parabolic boundary is initial ∪ lateral; the terminal
/// slice (t = T, x interior) is deliberately not part of it.
enum class NodeClass { interior, initial, lateral, terminal_interior };

/// Tensor-product node-centered grid on a box Ω × [0,T].
/// In 1D the y axis collapses to a single node (ny = 1, hy unused).
struct SpaceTimeGrid {
  int dim = 1;
  std::array<double, 2> box_lo{0.0, 0.0};
  std::array<double, 2> box_hi{1.0, 1.0};
  std::array<int, 2> nx{3, 1};
  std::array<double, 2> h{0.0, 0.0};
  double horizon_T = 1.0;
  int nt = 2;
  double dt = 0.0;

  int n_space() const { return nx[0] * nx[1]; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(nt) * n_space(); }

  double x(int i) const { return box_lo[0] + i * h[0]; }
  double y(int j) const { return dim == 2 ? box_lo[1] + j * h[1] : 0.0; }
  double t(int k) const { return k * dt; }

  int space_index(int i, int j) const { return i + nx[0] * j; }
  std::size_t node_index(int k, int i, int j) const {
    return static_cast<std::size_t>(k) * n_space() + space_index(i, j);
  }

  bool valid_node(int k, int i, int j) const {
    return k >= 0 && k < nt && i >= 0 && i < nx[0] && j >= 0 && j < nx[1];
  }

  /// Distance (in cells) from the spatial boundary along the tightest axis.
  int spatial_margin(int i, int j) const {
    int m = std::min(i, nx[0] - 1 - i);
    if (dim == 2) m = std::min(m, std::min(j, nx[1] - 1 - j));
    return m;
  }
};

inline SpaceTimeGrid build_grid(const std::array<double, 2>& box_lo,
                                const std::array<double, 2>& box_hi,
                                const std::array<int, 2>& nx, double horizon_T, int nt,
                                int dim = 2) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("build_grid: dim must be 1 or 2");
  SpaceTimeGrid g;
  g.dim = dim;
  g.box_lo = box_lo;
  g.box_hi = box_hi;
  g.nx = nx;
  if (dim == 1) {
    g.nx[1] = 1;
    g.box_lo[1] = 0.0;
    g.box_hi[1] = 0.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (!(box_hi[a] > box_lo[a]))
      throw std::invalid_argument("build_grid: degenerate box on axis " + std::to_string(a));
    if (g.nx[a] < 3)
      throw std::invalid_argument("build_grid: need nx >= 3 on axis " + std::to_string(a));
    g.h[a] = (g.box_hi[a] - g.box_lo[a]) / (g.nx[a] - 1);
  }
  if (nt < 2) throw std::invalid_argument("build_grid: need nt >= 2");
  if (!(horizon_T > 0.0)) throw std::invalid_argument("build_grid: need horizon_T > 0");
  g.horizon_T = horizon_T;
  g.nt = nt;
  g.dt = horizon_T / (nt - 1);
  return g;
}

inline NodeClass classify_node(const SpaceTimeGrid& g, int k, int i, int j) {
  if (!g.valid_node(k, i, j)) throw std::out_of_range("classify_node: index out of range");
  if (k == 0) return NodeClass::initial;
  const bool on_spatial_boundary = g.spatial_margin(i, j) == 0;
  if (on_spatial_boundary) return NodeClass::lateral;
  if (k == g.nt - 1) return NodeClass::terminal_interior;
  return NodeClass::interior;
}

/// Scalar values on the full space-time grid, time-major.
struct SpaceTimeField {
  const SpaceTimeGrid* grid = nullptr;
  std::vector<double> values;

  SpaceTimeField() = default;
  explicit SpaceTimeField(const SpaceTimeGrid& g)
      : grid(&g), values(g.n_nodes(), 0.0) {}

  double& at(int k, int i, int j) { return values[grid->node_index(k, i, j)]; }
  double at(int k, int i, int j) const { return values[grid->node_index(k, i, j)]; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Axis-aligned sub-box of node indices, inclusive on both ends.
struct Region {
  int k0, k1, i0, i1, j0, j1;

  static Region full(const SpaceTimeGrid& g) {
    return Region{0, g.nt - 1, 0, g.nx[0] - 1, 0, g.nx[1] - 1};
  }
  /// All times, spatial nodes at least `margin` cells from the boundary.
  static Region interior(const SpaceTimeGrid& g, int margin, int k0 = 0, int k1 = -1) {
    Region r;
    r.k0 = k0;
    r.k1 = (k1 < 0) ? g.nt - 1 : k1;
    r.i0 = margin;
    r.i1 = g.nx[0] - 1 - margin;
    r.j0 = (g.dim == 2) ? margin : 0;
    r.j1 = (g.dim == 2) ? g.nx[1] - 1 - margin : 0;
    return r;
  }
  bool empty() const { return k1 < k0 || i1 < i0 || j1 < j0; }
};

/// Visits every node of a region with its tensor-product trapezoidal weight:
/// `visit(k, i, j, w)`.
template <typename V>
void for_region_weighted(const SpaceTimeGrid& g, const Region& r, V&& visit) {
  if (r.empty()) throw std::invalid_argument("quadrature: empty region");
  if (r.k0 < 0 || r.k1 >= g.nt || r.i0 < 0 || r.i1 >= g.nx[0] || r.j0 < 0 || r.j1 >= g.nx[1])
    throw std::out_of_range("quadrature: region exceeds grid");
  auto wt = [](int idx, int lo, int hi) { return (idx == lo || idx == hi) ? 0.5 : 1.0; };
  const bool time_degenerate = (r.k0 == r.k1);
  const bool y_degenerate = (r.j0 == r.j1);
  for (int k = r.k0; k <= r.k1; ++k) {
    const double wk = time_degenerate ? 1.0 : wt(k, r.k0, r.k1) * g.dt;
    for (int j = r.j0; j <= r.j1; ++j) {
      const double wj = (g.dim == 2 && !y_degenerate) ? wt(j, r.j0, r.j1) * g.h[1] : 1.0;
      for (int i = r.i0; i <= r.i1; ++i)
        visit(k, i, j, wk * wj * g.h[0] * wt(i, r.i0, r.i1));
    }
  }
}

/// Tensor-product trapezoidal rule over a region of nodes. `f(k,i,j)` is the
/// integrand sampled at nodes; exact for multilinear integrands.
template <typename F>
double quadrature(const SpaceTimeGrid& g, const Region& r, F&& f) {
  double sum = 0.0;
  for_region_weighted(g, r, [&](int k, int i, int j, double w) { sum += w * f(k, i, j); });
  return sum;
}

inline double quadrature(const SpaceTimeField& field, const Region& r) {
  const SpaceTimeGrid& g = *field.grid;
  return quadrature(g, r, [&](int k, int i, int j) { return field.at(k, i, j); });
}

}  // namespace plab
