#include "sorw/second_order.hpp"

#include <cmath>
#include <string>

#include "sorw/detail/minimal_solve.hpp"
#include "sorw/error.hpp"

namespace sorw {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_node(const Graph& g, NodeId k) {
  if (k >= g.num_nodes()) throw PreconditionError("node " + std::to_string(k) + " out of range");
}

void require_irreducible(const EdgeChain& chain, const char* what) {
  auto report = check_irreducible(chain);
  if (report.irreducible) return;
  const std::string msg = std::string(what) + " requires an irreducible edge chain (" +
                          std::to_string(report.components.size()) + " components)";
  throw ReducibleChainError(msg, std::move(report.components));
}

detail::MinimalSolution edge_system(const EdgeChain& chain, NodeId k, const Tolerances& tol) {
  const Graph& g = chain.graph();
  require_node(g, k);
  std::vector<bool> boundary(g.num_edges(), false);
  Vector boundary_tau = Vector::Zero(idx(g.num_edges()));
  for (EdgeId e : g.out_edges(k)) boundary[e] = true;  // i = k: tau = 0
  for (EdgeId e : g.in_edges(k)) {                     // j = k, i != k: tau = 1
    boundary[e] = true;
    boundary_tau(idx(e)) = 1.0;
  }
  return detail::solve_minimal(chain.transition(), boundary, boundary_tau, tol);
}

// sum_e w_e x_e with the convention 0 * inf = 0.
double weighted_sum(const SparseMatrix& weights, Index row, const Vector& x) {
  double s = 0.0;
  for (SparseMatrix::InnerIterator it(weights, row); it; ++it) {
    if (it.value() == 0.0) continue;
    const double v = x(it.col());
    if (std::isinf(v)) return infinity;
    s += it.value() * v;
  }
  return s;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

Vector so_hitting_probabilities(const EdgeChain& chain, NodeId k, const Tolerances& tol) {
  return edge_system(chain, k, tol).phi;
}

SecondOrderHitting so_mean_hitting_times(const EdgeChain& chain, NodeId k, const Tolerances& tol) {
  auto sol = edge_system(chain, k, tol);
  return {k, std::move(sol.phi), std::move(sol.tau), std::move(sol.finite)};
}

Vector so_hitting_via_linegraph(const EdgeChain& chain, NodeId k, const Tolerances& tol) {
  const Graph& g = chain.graph();
  require_node(g, k);
  Vector out(idx(g.num_edges()));
  const auto in_k = g.in_edges(k);
  if (in_k.empty()) {
    out.setConstant(infinity);
  } else {
    const HittingSolution hit =
        mean_hitting_times(chain.transition(), StateSet(in_k.begin(), in_k.end()), tol);
    out = hit.tau.array() + 1.0;
  }
  for (EdgeId e : g.out_edges(k)) out(idx(e)) = 0.0;
  return out;
}

Vector so_node_hitting(const EdgeChain& chain, const FirstTransition& first, NodeId k,
                       const Tolerances& tol) {
  const SecondOrderHitting hit = so_mean_hitting_times(chain, k, tol);
  const Index n = idx(chain.graph().num_nodes());
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = weighted_sum(first.M, i, hit.tau_edge);
  out(idx(k)) = 0.0;
  return out;
}

double so_return_time(const EdgeChain& chain, const FirstTransition& first, NodeId i,
                      const Tolerances& tol) {
  const Graph& g = chain.graph();
  const SecondOrderHitting hit = so_mean_hitting_times(chain, i, tol);
  const SparseMatrix& P = chain.transition();
  double total = 1.0;
  for (EdgeId e : g.out_edges(i)) {
    const double pe = first.pprime(idx(e));
    if (pe == 0.0) continue;
    const double inner = weighted_sum(P, idx(e), hit.tau_edge);
    if (std::isinf(inner)) return infinity;
    total += pe * inner;
  }
  return total;
}

SecondOrderReturn so_return_times(const EdgeChain& chain, const PullbackData& data,
                                  const std::vector<NodeId>& S, const Tolerances& tol) {
  // The pullback already fixes the equilibrium density; a reducible edge
  // chain with a known density (the non-backtracking walk on a cycle) is fine.
  if (S.empty()) throw PreconditionError("node set must be nonempty");
  const Vector& pi = *data.chain.stationary();
  SecondOrderReturn out{S, Vector(idx(S.size())), 0.0};
  double mass = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k) {
    require_node(chain.graph(), S[k]);
    const double t = so_return_time(chain, data.first, S[k], tol);
    const double kac = 1.0 / pi(idx(S[k]));
    if (!close(t, kac, tol.so_return))
      throw InvariantViolation("second-order return time of node '" + chain.graph().label(S[k]) +
                               "' is " + std::to_string(t) + ", expected 1/pi = " + std::to_string(kac));
    out.tau(idx(k)) = t;
    mass += pi(idx(S[k]));
  }
  out.tau_set = 1.0 / mass;
  return out;
}

Matrix so_hitting_matrix_columns(const EdgeChain& chain, const FirstTransition& first,
                                 const Tolerances& tol) {
  const Index n = idx(chain.graph().num_nodes());
  Matrix T(n, n);
  for (Index k = 0; k < n; ++k) T.col(k) = so_node_hitting(chain, first, static_cast<NodeId>(k), tol);
  return T;
}

SecondOrderHittingMatrix so_hitting_matrix(const EdgeChain& chain, const PullbackData& data,
                                           const Tolerances& tol) {
  require_irreducible(chain, "so_hitting_matrix");
  const Graph& g = chain.graph();
  if (g.num_edges() > tol.dense_edge_cap)
    throw ResourceLimitError("dense edge hitting matrix needs |E| <= " +
                             std::to_string(tol.dense_edge_cap) + ", graph has " +
                             std::to_string(g.num_edges()) + " edges");
  const Index n = idx(g.num_nodes());
  const Index m = idx(g.num_edges());

  SecondOrderHittingMatrix out;
  out.by_columns = so_hitting_matrix_columns(chain, data.first, tol);

  const HittingMatrix edge_T = hitting_matrix(chain.transition(), data.edge_density, tol);
  out.edge_kemeny = edge_T.kemeny;
  out.a = Vector::Zero(m);
  out.b = Vector::Zero(n);
  for (NodeId j = 0; j < g.num_nodes(); ++j) {
    const auto in_j = g.in_edges(j);
    const SubsetDecomposition dec = subset_decomposition(
        chain.transition(), data.edge_density, StateSet(in_j.begin(), in_j.end()), edge_T.T, tol);
    for (EdgeId e : in_j) out.a(idx(e)) = dec.alpha(idx(e));
    out.b(idx(j)) = dec.beta;
  }
  const Matrix LT = data.L * edge_T.T;
  out.by_formula = (LT * out.a.asDiagonal()) * data.R;
  out.by_formula.rowwise() -= out.b.transpose();

  out.max_route_difference = (out.by_columns - out.by_formula).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, out.by_columns.cwiseAbs().maxCoeff());
  if (out.max_route_difference > tol.route_agreement * scale)
    throw InvariantViolation("second-order hitting matrix routes differ by " +
                             std::to_string(out.max_route_difference));
  return out;
}

RandomTargetReport so_random_target(const EdgeChain& chain, const PullbackData& data,
                                    const Matrix* tilde_T, const Tolerances& tol) {
  require_irreducible(chain, "so_random_target");
  const Graph& g = chain.graph();
  const Vector& pi = *data.chain.stationary();
  const Vector& pihat = data.edge_density;

  Matrix computed;
  if (!tilde_T) {
    computed = so_hitting_matrix_columns(chain, data.first, tol);
    tilde_T = &computed;
  }
  RandomTargetReport out;
  out.access = (*tilde_T) * pi;
  out.kappa_tilde = out.access.mean();
  out.spread = (out.access.array() - out.kappa_tilde).abs().maxCoeff() / out.kappa_tilde;

  // Return times of the edge chain to each in-neighbourhood.
  std::vector<ReturnData> returns;
  returns.reserve(g.num_nodes());
  out.condition_holds = true;
  out.condition_gap = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto in_i = g.in_edges(i);
    returns.push_back(return_times(chain.transition(), StateSet(in_i.begin(), in_i.end()), pihat, tol));
    const Vector& tp = returns.back().tau_plus;
    const double gap = tp.maxCoeff() - tp.minCoeff();
    out.condition_gap = std::max(out.condition_gap, gap);
    if (gap > tol.beta_constancy * std::max(1.0, tp.maxCoeff())) out.condition_holds = false;
  }
  if (!out.condition_holds) return out;

  double rho_error = 0.0, alpha_error = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const Vector& tp = returns[i].tau_plus;
    const double rho = tp.mean();
    rho_error = std::max(rho_error, std::abs(rho - 1.0 / pi(idx(i))));
    const auto in_i = g.in_edges(i);
    for (std::size_t k = 0; k < in_i.size(); ++k) {
      const double alpha = pihat(idx(in_i[k])) * tp(idx(k));
      alpha_error = std::max(alpha_error, std::abs(alpha - pihat(idx(in_i[k])) / pi(idx(i))));
    }
  }
  out.rho_error = rho_error;
  out.alpha_error = alpha_error;
  if (g.num_edges() <= tol.dense_edge_cap) {
    const auto full = so_hitting_matrix(chain, data, tol);
    out.kappa_error = std::abs(out.kappa_tilde - (full.edge_kemeny - full.b.dot(pi)));
  }
  return out;
}

}  // namespace sorw
