#include "sorw/chain.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "sorw/detail/scc.hpp"
#include "sorw/error.hpp"

namespace sorw {

namespace {

using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void check_row_stochastic(const SparseMatrix& P, double tol, const char* what) {
  if (P.rows() != P.cols()) throw PreconditionError(std::string(what) + " must be square");
  for (Index r = 0; r < P.outerSize(); ++r) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(P, r); it; ++it) {
      if (!(it.value() >= 0.0)) throw PreconditionError(std::string(what) + " has a negative entry");
      sum += it.value();
    }
    if (std::abs(sum - 1.0) > tol)
      throw PreconditionError(std::string(what) + " row " + std::to_string(r) + " sums to " +
                              std::to_string(sum));
  }
}

void check_density(const SparseMatrix& P, const Vector& v, double tol, const char* what) {
  if (v.size() != P.rows()) throw PreconditionError(std::string(what) + " has the wrong length");
  if (v.size() > 0 && !(v.minCoeff() > 0.0))
    throw PreconditionError(std::string(what) + " must be positive");
  if (std::abs(v.sum() - 1.0) > tol) throw PreconditionError(std::string(what) + " must sum to 1");
  if (stationary_residual(P, v) > tol)
    throw PreconditionError(std::string(what) + " is not invariant under the transition matrix");
}

void require_out_degree(const Graph& g) {
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.out_degree(i) == 0)
      throw PreconditionError("node '" + g.label(i) + "' has zero out-degree");
  }
}

void require_no_dangling(const Graph& g) {
  const auto dangling = dangling_edges(g);
  if (dangling.empty()) return;
  std::string list;
  for (std::size_t k = 0; k < dangling.size() && k < 10; ++k) {
    const auto [s, t] = g.edge(dangling[k]);
    list += (k ? ", (" : "(") + g.label(s) + "," + g.label(t) + ")";
  }
  if (dangling.size() > 10) list += ", ...";
  throw PreconditionError("non-backtracking walk undefined: " + std::to_string(dangling.size()) +
                          " dangling edge(s): " + list);
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& triplets) {
  SparseMatrix m(idx(n), idx(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

SparseMatrix uniform_edge_matrix(const Graph& g) {
  std::vector<Triplet> t;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const NodeId j = g.edge(e).target;
    const double p = 1.0 / static_cast<double>(g.out_degree(j));
    for (EdgeId f : g.out_edges(j)) t.emplace_back(idx(e), idx(f), p);
  }
  return from_triplets(g.num_edges(), t);
}

SparseMatrix nonbacktracking_edge_matrix(const Graph& g) {
  std::vector<Triplet> t;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    const double reciprocal = g.has_edge(j, i) ? 1.0 : 0.0;
    const double p = 1.0 / (static_cast<double>(g.out_degree(j)) - reciprocal);
    for (EdgeId f : g.out_edges(j)) {
      if (g.edge(f).target != i) t.emplace_back(idx(e), idx(f), p);
    }
  }
  return from_triplets(g.num_edges(), t);
}

Vector lazy_power_iteration(const SparseMatrix& P, const Tolerances& tol) {
  // (I + P)/2 has the same invariant vector and is aperiodic.
  const Index n = P.rows();
  Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::SparseMatrix<double> Pt = P.transpose();
  for (std::size_t it = 0; it < tol.max_sweeps; ++it) {
    Vector next = 0.5 * (v + Pt * v);
    next /= next.sum();
    v.swap(next);
    if (it % 16 == 0 && stationary_residual(P, v) <= std::min(tol.stationary_residual, 1e-13))
      return v;
  }
  throw InvariantViolation("stationary density: power iteration did not converge");
}

}  // namespace

double stationary_residual(const SparseMatrix& P, const Vector& v) {
  return (P.transpose() * v - v).lpNorm<1>();
}

NodeChain::NodeChain(GraphPtr graph, SparseMatrix transition, std::optional<Vector> stationary,
                     const Tolerances& tol)
    : graph_(std::move(graph)), transition_(std::move(transition)), stationary_(std::move(stationary)) {
  if (!graph_) throw PreconditionError("node chain needs a graph");
  if (transition_.rows() != idx(graph_->num_nodes()))
    throw PreconditionError("node transition matrix size does not match the graph");
  transition_.makeCompressed();
  check_row_stochastic(transition_, tol.row_sum, "node transition matrix");
  for (Index r = 0; r < transition_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(transition_, r); it; ++it) {
      if (it.value() > 0.0 &&
          !graph_->has_edge(static_cast<NodeId>(it.row()), static_cast<NodeId>(it.col())))
        throw PreconditionError("node transition matrix has mass outside the edge set");
    }
  }
  if (stationary_) check_density(transition_, *stationary_, tol.stationary_check, "node density");
}

EdgeChain::EdgeChain(GraphPtr graph, SparseMatrix transition, std::optional<Vector> stationary,
                     const Tolerances& tol)
    : graph_(std::move(graph)), transition_(std::move(transition)), stationary_(std::move(stationary)) {
  if (!graph_) throw PreconditionError("edge chain needs a graph");
  if (transition_.rows() != idx(graph_->num_edges()))
    throw PreconditionError("edge transition matrix size does not match the edge count");
  transition_.makeCompressed();
  check_row_stochastic(transition_, tol.row_sum, "edge transition matrix");
  for (Index r = 0; r < transition_.outerSize(); ++r) {
    const NodeId j = graph_->edge(static_cast<EdgeId>(r)).target;
    for (SparseMatrix::InnerIterator it(transition_, r); it; ++it) {
      if (it.value() > 0.0 && graph_->edge(static_cast<EdgeId>(it.col())).source != j)
        throw PreconditionError("edge transition matrix has mass outside the line graph");
    }
  }
  line_graph_ = sorw::line_graph(*graph_);
  irreducible_ = check_irreducible(transition_).irreducible ? Irreducibility::yes : Irreducibility::no;
  if (stationary_) check_density(transition_, *stationary_, tol.stationary_check, "edge density");
}

namespace {

// On undirected graphs the uniform, non-backtracking and downweighted edge
// chains are doubly stochastic, so the uniform density is invariant even
// when the chain is reducible.
std::optional<Vector> bistochastic_density(const Graph& g) {
  if (!g.undirected() || g.num_edges() == 0) return std::nullopt;
  return Vector::Constant(idx(g.num_edges()), 1.0 / static_cast<double>(g.num_edges()));
}

}  // namespace

NodeChain uniform_node_chain(GraphPtr g) {
  require_out_degree(*g);
  std::vector<Triplet> t;
  for (EdgeId e = 0; e < g->num_edges(); ++e) {
    const auto [i, j] = g->edge(e);
    t.emplace_back(idx(i), idx(j), 1.0 / static_cast<double>(g->out_degree(i)));
  }
  auto P = from_triplets(g->num_nodes(), t);
  return NodeChain(std::move(g), std::move(P));
}

EdgeChain uniform_edge_chain(GraphPtr g) {
  require_out_degree(*g);
  auto P = uniform_edge_matrix(*g);
  auto density = bistochastic_density(*g);
  return EdgeChain(std::move(g), std::move(P), std::move(density));
}

EdgeChain nonbacktracking_edge_chain(GraphPtr g) {
  require_out_degree(*g);
  require_no_dangling(*g);
  auto P = nonbacktracking_edge_matrix(*g);
  auto density = bistochastic_density(*g);
  return EdgeChain(std::move(g), std::move(P), std::move(density));
}

EdgeChain downweighted_edge_chain(GraphPtr g, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw PreconditionError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  require_out_degree(*g);
  if (alpha == 1.0) return uniform_edge_chain(std::move(g));
  require_no_dangling(*g);
  SparseMatrix P = alpha * uniform_edge_matrix(*g) + (1.0 - alpha) * nonbacktracking_edge_matrix(*g);
  P.prune(0.0);
  P.makeCompressed();
  auto density = bistochastic_density(*g);
  return EdgeChain(std::move(g), std::move(P), std::move(density));
}

EdgeChain edge_chain_from_tensor(GraphPtr g, std::span<const TensorEntry> probs, const Tolerances& tol) {
  std::vector<Triplet> t;
  std::vector<double> row_sum(g->num_edges(), 0.0);
  std::vector<bool> has_row(g->num_edges(), false);
  for (const auto& [i, j, k, p] : probs) {
    const auto e = g->find_edge(i, j);
    const auto f = g->find_edge(j, k);
    if (!e || !f)
      throw PreconditionError("transition (" + std::to_string(i) + "," + std::to_string(j) + "," +
                              std::to_string(k) + ") is not supported by the line graph");
    if (!(p >= 0.0)) throw PreconditionError("negative transition probability");
    t.emplace_back(idx(*e), idx(*f), p);
    row_sum[*e] += p;
    has_row[*e] = true;
  }
  for (EdgeId e = 0; e < g->num_edges(); ++e) {
    if (!has_row[e] || std::abs(row_sum[e] - 1.0) > tol.input_row_sum) {
      const auto [i, j] = g->edge(e);
      throw PreconditionError("transition probabilities from edge (" + g->label(i) + "," +
                              g->label(j) + ") sum to " + std::to_string(row_sum[e]));
    }
  }
  // Duplicate (i,j,k) entries are summed by setFromTriplets.
  auto P = from_triplets(g->num_edges(), t);
  // Absorb the permitted input slack so the stored rows are stochastic.
  for (Index r = 0; r < P.outerSize(); ++r) {
    const double s = row_sum[static_cast<std::size_t>(r)];
    if (std::abs(s - 1.0) <= tol.row_sum) continue;
    for (SparseMatrix::InnerIterator it(P, r); it; ++it) it.valueRef() /= s;
  }
  return EdgeChain(std::move(g), std::move(P), std::nullopt, tol);
}

std::vector<TensorEntry> tensor_of(const EdgeChain& chain) {
  const Graph& g = chain.graph();
  std::vector<TensorEntry> out;
  const SparseMatrix& P = chain.transition();
  for (Index r = 0; r < P.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(P, r); it; ++it) {
      const auto [i, j] = g.edge(static_cast<EdgeId>(r));
      out.push_back({i, j, g.edge(static_cast<EdgeId>(it.col())).target, it.value()});
    }
  }
  return out;
}

IrreducibilityReport check_irreducible(const SparseMatrix& P) {
  auto components = detail::tarjan_scc(static_cast<std::size_t>(P.rows()), [&](std::size_t v, auto&& visit) {
    for (SparseMatrix::InnerIterator it(P, idx(v)); it; ++it) {
      if (it.value() > 0.0) visit(static_cast<std::size_t>(it.col()));
    }
  });
  const bool ok = components.size() <= 1;
  return {ok, std::move(components)};
}

IrreducibilityReport check_irreducible(const EdgeChain& chain) {
  return check_irreducible(chain.transition());
}

Vector stationary_density(const SparseMatrix& P, const Tolerances& tol) {
  const Index n = P.rows();
  if (n == 0) throw PreconditionError("stationary density of an empty chain");
  auto report = check_irreducible(P);
  if (!report.irreducible)
    throw ReducibleChainError("chain is reducible (" + std::to_string(report.components.size()) +
                                  " strongly connected components)",
                              std::move(report.components));

  if (static_cast<std::size_t>(n) <= tol.direct_stationary_limit) {
    // (I - P^T) v = 0 with the last equation replaced by 1^T v = 1.
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(P.nonZeros() + 2 * n));
    for (Index r = 0; r < n - 1; ++r) t.emplace_back(r, r, 1.0);
    for (Index r = 0; r < P.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(P, r); it; ++it) {
        if (it.col() != n - 1) t.emplace_back(it.col(), r, -it.value());
      }
    }
    for (Index c = 0; c < n; ++c) t.emplace_back(n - 1, c, 1.0);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() == Eigen::Success) {
      Vector rhs = Vector::Zero(n);
      rhs(n - 1) = 1.0;
      Vector v = lu.solve(rhs);
      for (int refine = 0; refine < 3 && lu.info() == Eigen::Success; ++refine) {
        v /= v.sum();
        if (stationary_residual(P, v) <= tol.stationary_residual) break;
        v += lu.solve(rhs - A * v);
      }
      v /= v.sum();
      if (lu.info() == Eigen::Success && v.minCoeff() > 0.0 &&
          stationary_residual(P, v) <= tol.stationary_residual)
        return v;
    }
  }
  return lazy_power_iteration(P, tol);
}

Vector stationary_density(const NodeChain& chain, const Tolerances& tol) {
  if (chain.stationary()) return *chain.stationary();
  return stationary_density(chain.transition(), tol);
}

Vector stationary_density(const EdgeChain& chain, const Tolerances& tol) {
  if (chain.stationary()) return *chain.stationary();
  return stationary_density(chain.transition(), tol);
}

NodeChain with_stationary(const NodeChain& chain, const Tolerances& tol) {
  return NodeChain(chain.graph_ptr(), chain.transition(), stationary_density(chain, tol), tol);
}

EdgeChain with_stationary(const EdgeChain& chain, const Tolerances& tol) {
  return EdgeChain(chain.graph_ptr(), chain.transition(), stationary_density(chain, tol), tol);
}

}  // namespace sorw
