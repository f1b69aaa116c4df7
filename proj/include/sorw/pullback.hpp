#pragma once

#include "sorw/chain.hpp"

namespace sorw {

// Probabilities p'_{i,j} of the first step (X_0 = i, X_1 = j), indexed by
// edge, together with the |V| x |E| aggregation matrix M_{i,(i,j)} = p'_{i,j}.
struct FirstTransition {
  Vector pprime;
  SparseMatrix M;
};

// Validates that p' is nonnegative and sums to one over every out-neighbourhood.
FirstTransition first_transition(const Graph& g, Vector pprime,
                                 const Tolerances& tol = default_tolerances());

struct PullbackData {
  // Stationary density of the edge chain.
  Vector edge_density;
  // lambda_e = pihat_e / sum over in-edges of ter(e).
  Vector lambda;
  // |V| x |E| lifting matrix, L(ter(e), e) = lambda_e.
  SparseMatrix L;
  // |E| x |V| restriction matrix, R(e, ter(e)) = 1.
  SparseMatrix R;
  // P = L Phat R with its density pi = R^T pihat. These are the first-order
  // transition probabilities of the walk at equilibrium.
  NodeChain chain;
  // Equilibrium first-step probabilities and M.
  FirstTransition first;
};

// Throws ReducibleChainError for reducible edge chains and
// InvariantViolation if an identity that holds by construction fails.
PullbackData build_pullback(const EdgeChain& chain, const Tolerances& tol = default_tolerances());

// p^T L: spreads node mass over in-edges with weights lambda.
Vector lift_density(const Vector& p, const PullbackData& data);
// phat^T R: node i receives the mass of its in-edges.
Vector restrict_density(const Vector& phat, const PullbackData& data);

}  // namespace sorw
