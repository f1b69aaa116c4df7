#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <span>
#include <vector>

#include "sorw/config.hpp"
#include "sorw/graph.hpp"

namespace sorw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Compressed sparse row, 64-bit floats.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Irreducibility { yes, no, unknown };

// First-order random walk on the nodes of a graph.
class NodeChain {
 public:
  // Checks row-stochasticity, support on graph edges, and `stationary` when given.
  NodeChain(GraphPtr graph, SparseMatrix transition, std::optional<Vector> stationary = {},
            const Tolerances& tol = default_tolerances());

  const Graph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  const SparseMatrix& transition() const { return transition_; }
  const std::optional<Vector>& stationary() const { return stationary_; }
  std::size_t num_states() const { return static_cast<std::size_t>(transition_.rows()); }

 private:
  GraphPtr graph_;
  SparseMatrix transition_;
  std::optional<Vector> stationary_;
};

// Second-order random walk lifted to a first-order chain on directed edges.
// State e of the chain is edge e of the host graph.
class EdgeChain {
 public:
  EdgeChain(GraphPtr graph, SparseMatrix transition, std::optional<Vector> stationary = {},
            const Tolerances& tol = default_tolerances());

  const Graph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  const LineGraphMap& line_graph() const { return line_graph_; }
  const SparseMatrix& transition() const { return transition_; }
  const std::optional<Vector>& stationary() const { return stationary_; }
  Irreducibility irreducible() const { return irreducible_; }
  std::size_t num_states() const { return static_cast<std::size_t>(transition_.rows()); }

  // p_{i,j,k} for edges e = (i,j), f = (j,k); zero when (e,f) is not a line edge.
  double probability(EdgeId e, EdgeId f) const { return transition_.coeff(index(e), index(f)); }

 private:
  static Eigen::Index index(std::size_t i) { return static_cast<Eigen::Index>(i); }

  GraphPtr graph_;
  LineGraphMap line_graph_;
  SparseMatrix transition_;
  std::optional<Vector> stationary_;
  Irreducibility irreducible_ = Irreducibility::unknown;
};

NodeChain uniform_node_chain(GraphPtr g);

EdgeChain uniform_edge_chain(GraphPtr g);
EdgeChain nonbacktracking_edge_chain(GraphPtr g);
// alpha * uniform + (1 - alpha) * non-backtracking.
EdgeChain downweighted_edge_chain(GraphPtr g, double alpha);

struct TensorEntry {
  NodeId i, j, k;
  double probability;
};

// Builds P_{(i,j),(j,k)} = probability. Every edge needs a complete row.
EdgeChain edge_chain_from_tensor(GraphPtr g, std::span<const TensorEntry> probs,
                                 const Tolerances& tol = default_tolerances());
std::vector<TensorEntry> tensor_of(const EdgeChain& chain);

// Unique positive invariant density of an irreducible row-stochastic matrix.
// Throws ReducibleChainError listing the components otherwise.
Vector stationary_density(const SparseMatrix& transition, const Tolerances& tol = default_tolerances());
Vector stationary_density(const NodeChain& chain, const Tolerances& tol = default_tolerances());
Vector stationary_density(const EdgeChain& chain, const Tolerances& tol = default_tolerances());

// Copies of `chain` carrying their stationary density.
NodeChain with_stationary(const NodeChain& chain, const Tolerances& tol = default_tolerances());
EdgeChain with_stationary(const EdgeChain& chain, const Tolerances& tol = default_tolerances());

struct IrreducibilityReport {
  bool irreducible;
  std::vector<std::vector<std::size_t>> components;
};

// Strong connectivity of the positive-support digraph.
IrreducibilityReport check_irreducible(const SparseMatrix& transition);
IrreducibilityReport check_irreducible(const EdgeChain& chain);

// ||v^T P - v^T||_1
double stationary_residual(const SparseMatrix& transition, const Vector& v);

}  // namespace sorw
