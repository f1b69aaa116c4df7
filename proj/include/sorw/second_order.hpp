#pragma once

#include <optional>
#include <vector>

#include "sorw/first_order.hpp"
#include "sorw/pullback.hpp"

namespace sorw {

// Edge-level solution for target node k. Entry (i,j) conditions on X_0 = i,
// X_1 = j.
struct SecondOrderHitting {
  NodeId target;
  Vector phi_edge;
  Vector tau_edge;
  std::vector<bool> finite_edge;
};

// Second-order mean return times at equilibrium. `tau` holds the per-node
// values from the edge-level hitting times (aligned with `nodes`);
// `tau_set` is 1 / sum_{i in S} pi_i.
struct SecondOrderReturn {
  std::vector<NodeId> nodes;
  Vector tau;
  double tau_set;
};

struct SecondOrderHittingMatrix {
  // T~(i, k), assembled one target column at a time.
  Matrix by_columns;
  // L That Diag(a) R - 1 b^T.
  Matrix by_formula;
  // a_e = pihat_e tau+_{e -> in_ter(e)}, b_k = beta of the in_k decomposition.
  Vector a;
  Vector b;
  // Kemeny constant of the edge chain.
  double edge_kemeny;
  double max_route_difference;
};

struct RandomTargetReport {
  // a_i = sum_j pi_j T~(i, j).
  Vector access;
  double kappa_tilde;
  // max_i |access_i - kappa_tilde| / kappa_tilde
  double spread;
  // Return times tau+_{e -> in_i} agree over e in in_i for every node i.
  bool condition_holds;
  // Largest disagreement among those return times.
  double condition_gap;
  // Populated when the condition holds: max |rho_i - 1/pi_i|,
  // max |alpha_e - pihat_e/pi_i| and |kappa_tilde - (kappa - b^T pi)|.
  std::optional<double> rho_error;
  std::optional<double> alpha_error;
  std::optional<double> kappa_error;
};

// phi_{i,j->k}: one on edges touching k, minimal solution elsewhere.
Vector so_hitting_probabilities(const EdgeChain& chain, NodeId k,
                                const Tolerances& tol = default_tolerances());

// tau_{i,j->k}: 0 when i = k, 1 when j = k, otherwise the minimal solution
// of tau = 1 + sum_l p_{i,j,l} tau_{j,l}. Entries with phi < 1 are infinite.
SecondOrderHitting so_mean_hitting_times(const EdgeChain& chain, NodeId k,
                                         const Tolerances& tol = default_tolerances());

// Same quantity through first-order hitting times to in_k on the edge chain:
// 0 on out_k, tauhat_{(i,j) -> in_k} + 1 elsewhere.
Vector so_hitting_via_linegraph(const EdgeChain& chain, NodeId k,
                                const Tolerances& tol = default_tolerances());

// T~(., k) = M tau_edge. Infinite edge entries with positive weight make the
// node entry infinite.
Vector so_node_hitting(const EdgeChain& chain, const FirstTransition& first, NodeId k,
                       const Tolerances& tol = default_tolerances());
inline Vector so_node_hitting(const EdgeChain& chain, const PullbackData& data, NodeId k,
                              const Tolerances& tol = default_tolerances()) {
  return so_node_hitting(chain, data.first, k, tol);
}

// tau~_i = 1 + sum_{j,l} p'_{i,j} p_{i,j,l} tau_{j,l->i} for an arbitrary p'.
double so_return_time(const EdgeChain& chain, const FirstTransition& first, NodeId i,
                      const Tolerances& tol = default_tolerances());

// Uses the equilibrium of `data`. Each per-node value must match 1/pi_i.
SecondOrderReturn so_return_times(const EdgeChain& chain, const PullbackData& data,
                                  const std::vector<NodeId>& S,
                                  const Tolerances& tol = default_tolerances());

// T~ column by column; any size.
Matrix so_hitting_matrix_columns(const EdgeChain& chain, const FirstTransition& first,
                                 const Tolerances& tol = default_tolerances());

// Both routes, asserted equal. Throws ResourceLimitError when |E| exceeds
// tol.dense_edge_cap.
SecondOrderHittingMatrix so_hitting_matrix(const EdgeChain& chain, const PullbackData& data,
                                           const Tolerances& tol = default_tolerances());

// Access times and the hypothesis of the second-order random target lemma.
// Pass a precomputed T~ to avoid recomputing it.
RandomTargetReport so_random_target(const EdgeChain& chain, const PullbackData& data,
                                    const Matrix* tilde_T = nullptr,
                                    const Tolerances& tol = default_tolerances());

}  // namespace sorw
