#pragma once

#include <cstddef>

namespace sorw {

// All numerical tolerances and size limits in one place.
struct Tolerances {
  // Row sums of transition operators.
  double row_sum = 1e-12;
  // Row sums of user supplied tensors / first-transition probabilities.
  double input_row_sum = 1e-10;
  // ||v^T P - v^T||_1 for computed stationary densities.
  double stationary_residual = 1e-12;
  // pi^T P = pi^T for densities handed to a chain or derived by restriction.
  double stationary_check = 1e-10;
  // Kac identities and the in/out normalisation of p'.
  double kac = 1e-10;
  // Second-order return time: formula route vs 1/pi_i.
  double so_return = 1e-9;
  // Hitting matrix equation residual, random-target spread, subset identity.
  double hitting_matrix = 1e-8;
  // Independence of beta from the probe state; equality of return times
  // across the in-edges of a node.
  double beta_constancy = 1e-9;
  // Two routes to the second-order hitting matrix.
  double route_agreement = 1e-8;
  // Value iteration.
  double iteration = 1e-12;
  double divergence = 1e15;
  std::size_t max_sweeps = 10'000'000;
  // Largest state count solved by sparse LU for stationary densities.
  std::size_t direct_stationary_limit = 2'000'000;
  // Dense |E| x |E| edge hitting matrix guard.
  std::size_t dense_edge_cap = 20'000;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace sorw
