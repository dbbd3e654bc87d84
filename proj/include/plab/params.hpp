#pragma once

#include <stdexcept>
#include <string>

namespace plab {

/**
 * Problem parameters for the normalized p-Laplace flow
 *   u_t = Δu + (p-2) <∇u, D²u ∇u> / (|∇u|² + ε²).
 * Invariants: p > 1, epsilon >= 0, horizon_T > 0, dim in {1,2}.
 */
struct Params {
  double p = 2.0;
  double epsilon = 0.0;
  int dim = 1;
  double horizon_T = 1.0;

  void validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("Params: require p > 1, got p=" + std::to_string(p));
    if (!(epsilon >= 0.0)) throw std::invalid_argument("Params: require epsilon >= 0");
    if (dim != 1 && dim != 2) throw std::invalid_argument("Params: dim must be 1 or 2");
    if (!(horizon_T > 0.0)) throw std::invalid_argument("Params: require horizon_T > 0");
  }
};

}  // namespace plab
