#pragma once

#include <vector>

#include "sorw/chain.hpp"

namespace sorw::detail {

// Absorption problem on a row-stochastic P: boundary states carry fixed
// values, interior states satisfy
//   phi_i = sum_j P_ij phi_j            (phi = 1 on the boundary)
//   tau_i = 1 + sum_j P_ij tau_j        (tau = boundary_tau on the boundary)
// and the minimal nonnegative solution is returned. States that reach, via
// interior paths, a closed interior class get tau = inf and finite = false;
// every state with a finite tau has phi exactly 1.
struct MinimalSolution {
  Vector phi;
  Vector tau;
  std::vector<bool> finite;
};

MinimalSolution solve_minimal(const SparseMatrix& P, const std::vector<bool>& boundary,
                              const Vector& boundary_tau, const Tolerances& tol);

MinimalSolution solve_minimal_by_iteration(const SparseMatrix& P, const std::vector<bool>& boundary,
                                           const Vector& boundary_tau, const Tolerances& tol);

}  // namespace sorw::detail
