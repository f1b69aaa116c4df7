#include <doctest.h>

#include <random>

#include "../support/graphs.hpp"
#include "../support/oracle.hpp"
#include "sorw/detail/minimal_solve.hpp"
#include "sorw/error.hpp"
#include "sorw/first_order.hpp"

using namespace sorw;
namespace tg = testing_graphs;

namespace {

SparseMatrix sparse(const Matrix& m) { return m.sparseView(); }

// Gambler's ruin on 0..N with absorbing ends and a fair coin inside.
SparseMatrix ruin(int N) {
  Matrix P = Matrix::Zero(N + 1, N + 1);
  P(0, 0) = P(N, N) = 1.0;
  for (int i = 1; i < N; ++i) P(i, i - 1) = P(i, i + 1) = 0.5;
  return sparse(P);
}

std::vector<std::size_t> random_subset(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(1, n - 1);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size(rng));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST_CASE("C4 uniform walk: hitting times 3 and 4, Kemeny 2.5") {
  const NodeChain c = uniform_node_chain(tg::undirected(4, tg::cycle(4)));
  const HittingSolution h2 = mean_hitting_times(c.transition(), {2});
  CHECK(h2.tau(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(h2.tau(1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(h2.tau(2) == 0.0);
  const Vector pi = stationary_density(c);
  const HittingMatrix T = hitting_matrix(c.transition(), pi);
  CHECK(T.kemeny == doctest::Approx(2.5).epsilon(1e-14));
  const ReturnData r = return_times(c.transition(), {0}, pi);
  CHECK(r.tau_plus(0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("K4 uniform walk: every off-diagonal hitting time is 3") {
  const NodeChain c = uniform_node_chain(tg::undirected(4, tg::complete(4)));
  const HittingMatrix T = hitting_matrix(c.transition(), stationary_density(c));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(T.T(i, j) == doctest::Approx(i == j ? 0.0 : 3.0).epsilon(1e-14));
}

TEST_CASE("gambler's ruin: phi = i / N, tau = i (N - i) for the pair of ends") {
  const int N = 10;
  const SparseMatrix P = ruin(N);
  const Vector phi = hitting_probabilities(P, {static_cast<std::size_t>(N)});
  const HittingSolution both = mean_hitting_times(P, {0, static_cast<std::size_t>(N)});
  for (int i = 0; i <= N; ++i) {
    CHECK(phi(i) == doctest::Approx(static_cast<double>(i) / N).epsilon(1e-13));
    CHECK(both.tau(i) == doctest::Approx(static_cast<double>(i * (N - i))).epsilon(1e-13));
  }
  // Only one end as target: every state that can be absorbed at 0 first has
  // an infinite mean hitting time.
  const HittingSolution top = mean_hitting_times(P, {static_cast<std::size_t>(N)});
  CHECK(std::isinf(top.tau(0)));
  CHECK(std::isinf(top.tau(5)));
  CHECK_FALSE(top.finite[5]);
  CHECK(top.tau(N) == 0.0);
}

TEST_CASE("minimal solution agrees with value iteration on chains with traps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8;
    Matrix P = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (u(rng) < 0.35) P(i, j) = u(rng);
      if (P.row(i).sum() == 0.0) P(i, (i + 1) % n) = 1.0;
      P.row(i) /= P.row(i).sum();
    }
    // Node n - 1 absorbing: a trap unless it is the target.
    P.row(n - 1).setZero();
    P(n - 1, n - 1) = 1.0;
    const SparseMatrix S = sparse(P);
    const StateSet target{0};
    const Vector phi = hitting_probabilities(S, target);
    const Vector phi_it = hitting_probabilities_by_iteration(S, target);
    CHECK((phi - phi_it).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(phi(n - 1) == 0.0);
    const HittingSolution t = mean_hitting_times(S, target);
    const HittingSolution t_it = mean_hitting_times_by_iteration(S, target);
    for (int i = 0; i < n; ++i) {
      CHECK(t.finite[i] == t_it.finite[i]);
      CHECK(t.finite[i] == (phi(i) == 1.0));
      if (t.finite[i]) CHECK(t.tau(i) == doctest::Approx(t_it.tau(i)).epsilon(1e-8));
    }
  }
}

TEST_CASE("hitting times match a dense elimination oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + trial;
    const NodeChain c = uniform_node_chain(tg::undirected(n, tg::random_connected(n, 0.3, rng)));
    const Matrix dense(c.transition());
    const auto S = random_subset(static_cast<std::size_t>(n), rng);
    std::vector<int> Si(S.begin(), S.end());
    const Vector expected = oracle::fo_hitting(dense, Si);
    const HittingSolution got = mean_hitting_times(c.transition(), S);
    CHECK((got.tau - expected).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, expected.maxCoeff()));
    const Vector pi = stationary_density(c);
    CHECK((pi - oracle::fo_density(dense)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("classical identities on random chains") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 5 + 2 * trial;
    // Random weights on a strongly connected support: not reversible.
    const auto g = tg::undirected(n, tg::random_connected(n, 0.3, rng));
    Matrix P = Matrix::Zero(n, n);
    for (const Edge& e : g->edges()) P(e.source, e.target) = w(rng);
    for (int i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
    const SparseMatrix S = sparse(P);
    const Vector pi = stationary_density(S);
    for (int i = 0; i < n; ++i) {
      const ReturnData r = return_times(S, {static_cast<std::size_t>(i)}, pi);
      CHECK(std::abs(r.tau_plus(0) * pi(i) - 1.0) <= 1e-10);
    }
    const HittingMatrix T = hitting_matrix(S, pi);
    CHECK(T.spread <= 1e-8);
    CHECK(T.residual <= 1e-8);
    for (int s = 0; s < 10; ++s) {
      const auto subset = random_subset(static_cast<std::size_t>(n), rng);
      const SubsetDecomposition d = subset_decomposition(S, pi, subset, T.T);
      CHECK(d.identity_residual <= 1e-8);
      CHECK(d.beta_spread <= 1e-9 * std::max(1.0, std::abs(d.beta)));
      const ReturnData r = return_times(S, subset, pi);
      CHECK(r.tau_set == doctest::Approx(r.tau_set_kac).epsilon(1e-10));
    }
  }
}

TEST_CASE("first-order errors") {
  const SparseMatrix P = ruin(4);
  CHECK_THROWS_AS(mean_hitting_times(P, {}), PreconditionError);
  CHECK_THROWS_AS(mean_hitting_times(P, {9}), PreconditionError);
  CHECK_THROWS_AS(return_times(P, {0}, Vector::Ones(5) / 5.0), ReducibleChainError);
  CHECK_THROWS_AS(hitting_matrix(P, Vector::Ones(5) / 5.0), ReducibleChainError);
}
