#include "sorw/pullback.hpp"

#include <cmath>
#include <string>

#include "sorw/error.hpp"

namespace sorw {

namespace {

using Index = Eigen::Index;
using Triplet = Eigen::Triplet<double>;

Index idx(std::size_t i) { return static_cast<Index>(i); }

SparseMatrix make_sparse(Index rows, Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FirstTransition first_transition(const Graph& g, Vector pprime, const Tolerances& tol) {
  if (pprime.size() != idx(g.num_edges()))
    throw PreconditionError("first-transition vector must have one entry per edge");
  std::vector<Triplet> t;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    double sum = 0.0;
    for (EdgeId e : g.out_edges(i)) {
      const double p = pprime(idx(e));
      if (!(p >= 0.0)) throw PreconditionError("negative first-transition probability");
      sum += p;
      if (p > 0.0) t.emplace_back(idx(i), idx(e), p);
    }
    if (std::abs(sum - 1.0) > tol.input_row_sum)
      throw PreconditionError("first-transition probabilities out of node '" + g.label(i) +
                              "' sum to " + std::to_string(sum));
  }
  SparseMatrix M = make_sparse(idx(g.num_nodes()), idx(g.num_edges()), t);
  return {std::move(pprime), std::move(M)};
}

PullbackData build_pullback(const EdgeChain& chain, const Tolerances& tol) {
  const Graph& g = chain.graph();
  // A density attached to the chain (e.g. the uniform one of a doubly
  // stochastic chain) is used as is; otherwise the chain must be irreducible.
  const Vector pihat = chain.stationary() ? *chain.stationary() : stationary_density(chain, tol);
  const Index n = idx(g.num_nodes());
  const Index m = idx(g.num_edges());

  Vector in_mass = Vector::Zero(n), out_mass = Vector::Zero(n);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    in_mass(idx(g.edge(e).target)) += pihat(idx(e));
    out_mass(idx(g.edge(e).source)) += pihat(idx(e));
  }
  for (Index i = 0; i < n; ++i) {
    if (!(in_mass(i) > 0.0))
      throw PreconditionError("node '" + g.label(static_cast<NodeId>(i)) + "' has no in-edges");
    if (std::abs(in_mass(i) - out_mass(i)) > tol.kac)
      throw InvariantViolation("stationary edge mass into node '" + g.label(static_cast<NodeId>(i)) +
                               "' differs from the mass out of it");
  }

  Vector lambda(m), pprime(m);
  std::vector<Triplet> lt, rt;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    lambda(idx(e)) = pihat(idx(e)) / in_mass(idx(j));
    pprime(idx(e)) = pihat(idx(e)) / out_mass(idx(i));
    lt.emplace_back(idx(j), idx(e), lambda(idx(e)));
    rt.emplace_back(idx(e), idx(j), 1.0);
  }
  SparseMatrix L = make_sparse(n, m, lt);
  SparseMatrix R = make_sparse(m, n, rt);

  SparseMatrix P = L * chain.transition() * R;
  P.prune(0.0);
  P.makeCompressed();
  const Vector pi = R.transpose() * pihat;
  if (stationary_residual(P, pi) > tol.stationary_check)
    throw InvariantViolation("restricted density is not invariant under the pullback");

  NodeChain pulled(chain.graph_ptr(), std::move(P), pi, tol);
  auto report = check_irreducible(pulled.transition());
  if (!report.irreducible)
    throw ReducibleChainError("pullback chain is reducible", std::move(report.components));

  FirstTransition first = first_transition(g, std::move(pprime), tol);
  return {pihat, std::move(lambda), std::move(L), std::move(R), std::move(pulled), std::move(first)};
}

Vector lift_density(const Vector& p, const PullbackData& data) { return data.L.transpose() * p; }

Vector restrict_density(const Vector& phat, const PullbackData& data) {
  return data.R.transpose() * phat;
}

}  // namespace sorw
