#pragma once

#include <limits>
#include <vector>

#include "sorw/chain.hpp"

namespace sorw {

using StateSet = std::vector<std::size_t>;

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Minimal nonnegative solutions of the hitting systems for target set S.
// Infinite mean hitting times are stored as `infinity` with finite[i] false.
struct HittingSolution {
  StateSet target;
  Vector phi;
  Vector tau;
  std::vector<bool> finite;
};

// Mean return times tau+_{i->S} for i in S (aligned with `target`) and the
// set return time computed as the pi-weighted average. `tau_set_kac` is
// 1 / sum_{i in S} pi_i; both are required to agree.
struct ReturnData {
  StateSet target;
  Vector tau_plus;
  double tau_set;
  double tau_set_kac;
};

struct HittingMatrix {
  // T(i, j) = mean hitting time from i to j, zero diagonal.
  Matrix T;
  // Mean over i of sum_j pi_j T(i, j) and the relative spread max_i |.-kappa|/kappa.
  double kemeny;
  double spread;
  // max |(I - P) T - (1 1^T - Diag(pi)^{-1})|
  double residual;
};

struct SubsetDecomposition {
  // Full-length weights: pi_i tau+_{i->S} on S, zero elsewhere.
  Vector alpha;
  double beta;
  // max over probe states k in S of |beta_k - beta|.
  double beta_spread;
  // max |t^S - (sum_i alpha_i t^i - beta 1)|
  double identity_residual;
};

// phi_{i->S}. Structurally unreachable states get 0; the rest is a direct
// sparse solve. Falls back to value iteration if the factorisation fails.
Vector hitting_probabilities(const SparseMatrix& P, const StateSet& S,
                             const Tolerances& tol = default_tolerances());
HittingSolution mean_hitting_times(const SparseMatrix& P, const StateSet& S,
                                   const Tolerances& tol = default_tolerances());

// Monotone value iteration from zero: the defining construction of the
// minimal nonnegative solution. Slow; meant for cross-checks and fallbacks.
Vector hitting_probabilities_by_iteration(const SparseMatrix& P, const StateSet& S,
                                          const Tolerances& tol = default_tolerances());
HittingSolution mean_hitting_times_by_iteration(const SparseMatrix& P, const StateSet& S,
                                                const Tolerances& tol = default_tolerances());

// tau+_{i->S} = 1 + sum_j P_ij tau_{j->S} for i in S, set return time by both
// routes. Throws ReducibleChainError / InvariantViolation.
ReturnData return_times(const SparseMatrix& P, const StateSet& S, const Vector& pi,
                        const Tolerances& tol = default_tolerances());

// All-pairs mean hitting times, one column solve per target.
HittingMatrix hitting_matrix(const SparseMatrix& P, const Vector& pi,
                             const Tolerances& tol = default_tolerances());

// alpha, beta with t^S = sum_{i in S} alpha_i t^i - beta 1. The overload
// taking T reuses precomputed singleton columns.
SubsetDecomposition subset_decomposition(const SparseMatrix& P, const Vector& pi, const StateSet& S,
                                         const Tolerances& tol = default_tolerances());
SubsetDecomposition subset_decomposition(const SparseMatrix& P, const Vector& pi, const StateSet& S,
                                         const Matrix& T, const Tolerances& tol = default_tolerances());

// Chain overloads forward to the transition matrix.
template <class Chain>
HittingSolution mean_hitting_times(const Chain& chain, const StateSet& S) {
  return mean_hitting_times(chain.transition(), S);
}
template <class Chain>
Vector hitting_probabilities(const Chain& chain, const StateSet& S) {
  return hitting_probabilities(chain.transition(), S);
}

}  // namespace sorw
