#include <doctest.h>

#include <random>
#include <set>

#include "../support/graphs.hpp"
#include "../support/oracle.hpp"
#include "sorw/error.hpp"
#include "sorw/second_order.hpp"

using namespace sorw;
namespace tg = testing_graphs;

namespace {

struct Case {
  int n;
  tg::EdgeList edges;
  GraphPtr g;
  oracle::PairGraph pg;
};

Case make_case(int n, tg::EdgeList edges) {
  Case c{n, edges, tg::undirected(n, edges), oracle::pair_graph(n, edges)};
  return c;
}

EdgeChain chain_of(const Case& c, const oracle::Tensor& p) {
  std::vector<TensorEntry> t;
  for (const Edge& e : c.g->edges())
    for (EdgeId f : c.g->out_edges(e.target)) {
      const NodeId k = c.g->edge(f).target;
      t.push_back({e.source, e.target, k,
                   p(static_cast<int>(e.source), static_cast<int>(e.target), static_cast<int>(k))});
    }
  return edge_chain_from_tensor(c.g, t);
}

bool same(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

// Rotating walk: backtrack with probability 0.1, otherwise prefer the
// neighbour following j in label order.
oracle::Tensor rotating(const oracle::PairGraph& g) {
  return [g](int i, int j, int k) {
    if (!g.edge(j, k)) return 0.0;
    const int d = g.out_degree(j);
    if (d == 1) return 1.0;
    if (k == i) return 0.1;
    int pick = -1;
    for (int s = 1; s <= g.n && pick < 0; ++s) {
      const int c = (j + s) % g.n;
      if (c != i && g.edge(j, c)) pick = c;
    }
    if (d == 2) return 0.9;
    return k == pick ? 0.9 * 0.6 : 0.9 * 0.4 / (d - 2);
  };
}

}  // namespace

TEST_CASE("C4 non-backtracking walk: hand-computed values") {
  const Case c = make_case(4, tg::cycle(4));
  const EdgeChain chain = nonbacktracking_edge_chain(c.g);
  const EdgeId e01 = *c.g->find_edge(0, 1), e03 = *c.g->find_edge(0, 3);
  const SecondOrderHitting h2 = so_mean_hitting_times(chain, 2);
  CHECK(h2.tau_edge(e01) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(h2.tau_edge(e03) == doctest::Approx(2.0).epsilon(1e-14));
  const SecondOrderHitting h1 = so_mean_hitting_times(chain, 1);
  CHECK(h1.tau_edge(e01) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h1.tau_edge(e03) == doctest::Approx(3.0).epsilon(1e-14));

  const PullbackData data = build_pullback(chain);
  CHECK(so_node_hitting(chain, data, 1)(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(so_node_hitting(chain, data, 2)(0) == doctest::Approx(2.0).epsilon(1e-14));
  for (NodeId i = 0; i < 4; ++i) CHECK(so_return_time(chain, data.first, i) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("K4 uniform edge chain reduces to the classical walk") {
  const Case c = make_case(4, tg::complete(4));
  const EdgeChain chain = uniform_edge_chain(c.g);
  const PullbackData data = build_pullback(chain);
  const Matrix T = so_hitting_matrix_columns(chain, data.first);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(T(i, j) == doctest::Approx(i == j ? 0.0 : 3.0).epsilon(1e-13));
}

TEST_CASE("edge-level and node-level hitting times match the pair oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + trial;
    const Case c = make_case(n, tg::random_connected(n, 0.3, rng));
    const std::vector<oracle::Tensor> tensors{oracle::uniform_tensor(c.pg), oracle::nonbacktracking_tensor(c.pg),
                                              oracle::downweighted_tensor(c.pg, 0.5), rotating(c.pg)};
    for (const auto& p : tensors) {
      const EdgeChain chain = chain_of(c, p);
      for (int k = 0; k < n; ++k) {
        const oracle::Dense expected = oracle::so_hitting(c.pg, p, k);
        const SecondOrderHitting got = so_mean_hitting_times(chain, static_cast<NodeId>(k));
        for (EdgeId e = 0; e < c.g->num_edges(); ++e) {
          const auto [i, j] = c.g->edge(e);
          CHECK(same(got.tau_edge(e), expected(i, j), 1e-8));
        }
      }
      if (check_irreducible(chain).irreducible) {
        const PullbackData data = build_pullback(chain);
        const Matrix T = so_hitting_matrix_columns(chain, data.first);
        const oracle::Dense expected = oracle::so_node_hitting(c.pg, p);
        CHECK((T - expected).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, expected.maxCoeff()));
      }
    }
  }
}

TEST_CASE("hitting probabilities below one and infinite hitting times") {
  // Triangle 0-1-2 with pendant 3 on node 2. The pair (0,1) bounces
  // between 0 and 1 forever; everything else is uniform.
  const Case c = make_case(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}});
  const auto u = oracle::uniform_tensor(c.pg);
  const oracle::Tensor p = [u](int i, int j, int k) {
    if ((i == 0 && j == 1) || (i == 1 && j == 0)) return k == i ? 1.0 : 0.0;
    return u(i, j, k);
  };
  const EdgeChain chain = chain_of(c, p);
  const oracle::Dense phi = oracle::so_hitting_probability(c.pg, p, 3);
  const oracle::Dense tau = oracle::so_hitting(c.pg, p, 3);
  const Vector got_phi = so_hitting_probabilities(chain, 3);
  const SecondOrderHitting got = so_mean_hitting_times(chain, 3);
  bool saw_partial = false, saw_zero = false;
  for (EdgeId e = 0; e < c.g->num_edges(); ++e) {
    const auto [i, j] = c.g->edge(e);
    CHECK(got_phi(e) == doctest::Approx(phi(i, j)).epsilon(1e-10));
    CHECK(same(got.tau_edge(e), tau(i, j), 1e-8));
    CHECK(got.finite_edge[e] == std::isfinite(tau(i, j)));
    saw_partial = saw_partial || (phi(i, j) > 0.0 && phi(i, j) < 1.0);
    saw_zero = saw_zero || phi(i, j) == 0.0;
  }
  CHECK(saw_partial);
  CHECK(saw_zero);
  const Vector via = so_hitting_via_linegraph(chain, 3);
  for (EdgeId e = 0; e < c.g->num_edges(); ++e) CHECK(same(via(e), got.tau_edge(e), 1e-10));
}

TEST_CASE("line-graph route agrees with the direct system") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 6 + 2 * trial;
    const Case c = make_case(n, tg::random_connected(n, 0.2, rng));
    for (const EdgeChain& chain :
         {uniform_edge_chain(c.g), nonbacktracking_edge_chain(c.g), downweighted_edge_chain(c.g, 0.5)}) {
      for (NodeId k = 0; k < c.g->num_nodes(); ++k) {
        const Vector a = so_mean_hitting_times(chain, k).tau_edge;
        const Vector b = so_hitting_via_linegraph(chain, k);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }
}

TEST_CASE("second-order Kac identity and set return times") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 5 + 2 * trial;
    const Case c = make_case(n, tg::random_connected(n, 0.3, rng));
    for (const auto& p : {oracle::nonbacktracking_tensor(c.pg), rotating(c.pg)}) {
      const EdgeChain chain = chain_of(c, p);
      if (!check_irreducible(chain).irreducible) continue;
      const PullbackData data = build_pullback(chain);
      const Vector& pi = *data.chain.stationary();
      for (NodeId i = 0; i < c.g->num_nodes(); ++i)
        CHECK(std::abs(so_return_time(chain, data.first, i) * pi(i) - 1.0) <= 1e-10);
      std::vector<NodeId> S{0, static_cast<NodeId>(n / 2), static_cast<NodeId>(n - 1)};
      const SecondOrderReturn r = so_return_times(chain, data, S);
      const double expected = oracle::so_set_return(c.pg, p, {0, n / 2, n - 1});
      CHECK(r.tau_set == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("undirected graphs: return time sum d / d_i for every alpha") {
  std::mt19937_64 rng(47);
  const Case c = make_case(12, tg::random_connected(12, 0.25, rng));
  for (double alpha : {0.0, 0.3, 0.7, 1.0}) {
    const EdgeChain chain = downweighted_edge_chain(c.g, alpha);
    const PullbackData data = build_pullback(chain);
    for (NodeId i = 0; i < 12; ++i) {
      const double expected = static_cast<double>(c.g->num_edges()) / static_cast<double>(c.g->out_degree(i));
      CHECK(so_return_time(chain, data.first, i) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("two routes to the second-order hitting matrix") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 6 + 3 * trial;
    const Case c = make_case(n, tg::random_connected(n, 0.3, rng));
    for (const auto& p : {oracle::downweighted_tensor(c.pg, 0.5), rotating(c.pg)}) {
      const EdgeChain chain = chain_of(c, p);
      const PullbackData data = build_pullback(chain);
      const SecondOrderHittingMatrix h = so_hitting_matrix(chain, data);
      CHECK(h.max_route_difference <= 1e-8);
      CHECK(h.by_columns.diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("constant return times on in-neighbourhoods: K4 and K33") {
  for (const Case& c : {make_case(4, tg::complete(4)), make_case(6, tg::complete_bipartite(3, 3))}) {
    const EdgeChain chain = uniform_edge_chain(c.g);
    const PullbackData data = build_pullback(chain);
    const RandomTargetReport r = so_random_target(chain, data);
    CHECK(r.condition_holds);
    CHECK(r.spread <= 1e-9);
    REQUIRE(r.rho_error.has_value());
    CHECK(*r.rho_error <= 1e-9);
    CHECK(*r.alpha_error <= 1e-9);
    REQUIRE(r.kappa_error.has_value());
    CHECK(*r.kappa_error <= 1e-8);
  }
}

TEST_CASE("random target report on a non-symmetric walk") {
  std::mt19937_64 rng(59);
  const Case c = make_case(9, tg::random_connected(9, 0.3, rng));
  const EdgeChain chain = chain_of(c, rotating(c.pg));
  const PullbackData data = build_pullback(chain);
  const RandomTargetReport r = so_random_target(chain, data);
  CHECK(r.access.size() == 9);
  CHECK(r.kappa_tilde > 0.0);
  if (!r.condition_holds) CHECK_FALSE(r.rho_error.has_value());
}

TEST_CASE("second-order preconditions") {
  const Case c = make_case(3, tg::cycle(3));
  const EdgeChain chain = nonbacktracking_edge_chain(c.g);
  CHECK_THROWS_AS(so_mean_hitting_times(chain, 5), PreconditionError);
  const PullbackData data = build_pullback(chain);
  CHECK(so_return_times(chain, data, {0}).tau(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(so_hitting_matrix(chain, data), ReducibleChainError);
  Tolerances small;
  small.dense_edge_cap = 4;
  const Case k = make_case(4, tg::complete(4));
  const EdgeChain u = uniform_edge_chain(k.g);
  CHECK_THROWS_AS(so_hitting_matrix(u, build_pullback(u), small), ResourceLimitError);
}

TEST_CASE("two routes at the size of the stripped Dolphins network") {
  // 53 nodes, 150 undirected edges: 300 directed edges, dense 300 x 300.
  std::mt19937_64 rng(71);
  tg::EdgeList edges = tg::cycle(53);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) seen.insert({std::min(u, v), std::max(u, v)});
  std::uniform_int_distribution<int> node(0, 52);
  while (edges.size() < 150) {
    int u = node(rng), v = node(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert({u, v}).second) edges.emplace_back(u, v);
  }
  const GraphPtr g = tg::undirected(53, edges);
  const EdgeChain chain = nonbacktracking_edge_chain(g);
  const SecondOrderHittingMatrix h = so_hitting_matrix(chain, build_pullback(chain));
  CHECK(h.max_route_difference <= 1e-8);
}
