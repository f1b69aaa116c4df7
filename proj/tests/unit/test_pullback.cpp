#include <doctest.h>

#include <random>

#include "../support/graphs.hpp"
#include "sorw/error.hpp"
#include "sorw/pullback.hpp"

using namespace sorw;
namespace tg = testing_graphs;

namespace {

EdgeChain rotating_chain(const GraphPtr& g, double back, double bias) {
  // Backtrack with probability `back`, otherwise favour the smallest label.
  std::vector<TensorEntry> t;
  for (const Edge& e : g->edges()) {
    const auto out = g->out_edges(e.target);
    const double others = static_cast<double>(out.size() - 1);
    NodeId first = g->num_nodes();
    for (EdgeId f : out)
      if (g->edge(f).target != e.source) first = std::min(first, g->edge(f).target);
    for (EdgeId f : out) {
      const NodeId k = g->edge(f).target;
      double p;
      if (k == e.source)
        p = back;
      else if (others == 1.0)
        p = 1.0 - back;
      else
        p = (1.0 - back) * (k == first ? bias : (1.0 - bias) / (others - 1.0));
      t.push_back({e.source, e.target, k, p});
    }
  }
  return edge_chain_from_tensor(g, t);
}

}  // namespace

TEST_CASE("pullback of the standard chains on undirected graphs is the uniform walk") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 6 + 3 * trial;
    const auto g = tg::undirected(n, tg::random_connected(n, 0.25, rng));
    const Matrix uniform(uniform_node_chain(g).transition());
    for (const EdgeChain& c : {uniform_edge_chain(g), nonbacktracking_edge_chain(g),
                               downweighted_edge_chain(g, 0.4)}) {
      const PullbackData d = build_pullback(c);
      CHECK((Matrix(d.chain.transition()) - uniform).cwiseAbs().maxCoeff() <= 1e-12);
      const Matrix LR(d.L * d.R);
      CHECK((LR - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-15);
      // pi_i = d_i / sum d.
      const Vector& pi = *d.chain.stationary();
      for (NodeId i = 0; i < g->num_nodes(); ++i)
        CHECK(pi(i) == doctest::Approx(static_cast<double>(g->out_degree(i)) / g->num_edges()).epsilon(1e-13));
      // p'_{ij} = 1 / d_i.
      for (EdgeId e = 0; e < g->num_edges(); ++e)
        CHECK(d.first.pprime(e) == doctest::Approx(1.0 / g->out_degree(g->edge(e).source)).epsilon(1e-13));
    }
  }
}

TEST_CASE("pullback identities for a non-doubly-stochastic tensor") {
  std::mt19937_64 rng(23);
  const auto g = tg::undirected(9, tg::random_connected(9, 0.35, rng));
  const EdgeChain c = rotating_chain(g, 0.15, 0.7);
  const PullbackData d = build_pullback(c);
  const Vector& pi = *d.chain.stationary();
  CHECK(std::abs(pi.sum() - 1.0) <= 1e-13);
  CHECK(stationary_residual(d.chain.transition(), pi) <= 1e-12);
  CHECK((lift_density(pi, d) - d.edge_density).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((restrict_density(d.edge_density, d) - pi).cwiseAbs().maxCoeff() <= 1e-15);
  // lambda sums to one over each in-neighbourhood; L R = I.
  const Matrix LR(d.L * d.R);
  CHECK((LR - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-15);
  // p' at equilibrium: in-mass equals out-mass at every node.
  for (NodeId i = 0; i < g->num_nodes(); ++i) {
    double out = 0.0;
    for (EdgeId e : g->out_edges(i)) out += d.edge_density(e);
    CHECK(out == doctest::Approx(pi(i)).epsilon(1e-12));
  }
  // P_ij = sum over in-edges (h,i) of lambda_(h,i) p_{h,i,j}.
  for (EdgeId f = 0; f < g->num_edges(); ++f) {
    const auto [i, j] = g->edge(f);
    double expected = 0.0;
    for (EdgeId e : g->in_edges(i)) expected += d.lambda(e) * c.probability(e, f);
    CHECK(d.chain.transition().coeff(i, j) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("pullback of a reducible chain without a known density") {
  // Directed 3-cycle with both orientations: the non-backtracking tensor
  // splits into two rotations and has no unique density.
  const auto g = tg::undirected(3, tg::cycle(3));
  std::vector<TensorEntry> t = tensor_of(nonbacktracking_edge_chain(g));
  CHECK_THROWS_AS(build_pullback(edge_chain_from_tensor(g, t)), ReducibleChainError);
  // With the uniform density attached the pullback is the uniform walk.
  const PullbackData d = build_pullback(nonbacktracking_edge_chain(g));
  CHECK((Matrix(d.chain.transition()) - Matrix(uniform_node_chain(g).transition())).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("first transition validation") {
  const auto g = tg::undirected(3, tg::cycle(3));
  Vector p = Vector::Constant(6, 0.5);
  CHECK_NOTHROW(first_transition(*g, p));
  p(0) = 0.7;
  CHECK_THROWS_AS(first_transition(*g, p), PreconditionError);
  CHECK_THROWS_AS(first_transition(*g, Vector::Constant(5, 0.5)), PreconditionError);
}
