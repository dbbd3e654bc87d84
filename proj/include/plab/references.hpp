#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "plab/calculus.hpp"
#include "plab/params.hpp"

namespace plab {

/// A closed-form solution used as an oracle, with the parameter range it is
/// valid for.
struct ReferenceSolution {
  std::function<double(Vec2, double)> evaluator;
  std::string description;
  std::function<bool(const Params&)> valid_params;
};

/// u(x,t) = e^{-(p-1)k²t} sin(kx): exact solution of the unregularized 1D
/// flow away from critical points (the 1D equation is u_t = (p-1)u_xx).
inline ReferenceSolution exact_1d_mode(double k, double p) {
  if (!(k > 0.0)) throw std::invalid_argument("exact_1d_mode: need k > 0");
  if (!(p > 1.0)) throw std::invalid_argument("exact_1d_mode: need p > 1");
  ReferenceSolution ref;
  ref.evaluator = [k, p](Vec2 x, double t) {
    return std::exp(-(p - 1.0) * k * k * t) * std::sin(k * x.x);
  };
  ref.description = "exp(-(p-1)k^2 t) sin(kx), k=" + std::to_string(k);
  ref.valid_params = [p](const Params& pr) { return pr.dim == 1 && pr.p == p; };
  return ref;
}

/// For radial u the operator reduces to (p-1)u_rr + (n-1)u_r/r; cross-checks
/// normalized_p_laplacian on radial fields.
inline double radial_operator_reduction(double u_r, double u_rr, double r, double p, int n) {
  if (!(r > 0.0)) throw std::invalid_argument("radial_operator_reduction: r must be positive");
  return (p - 1.0) * u_rr + (n - 1) * u_r / r;
}

}  // namespace plab
