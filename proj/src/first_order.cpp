#include "sorw/first_order.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "sorw/detail/minimal_solve.hpp"
#include "sorw/error.hpp"

namespace sorw {

namespace {

using Index = Eigen::Index;

std::vector<bool> membership(const SparseMatrix& P, const StateSet& S) {
  if (S.empty()) throw PreconditionError("target set must be nonempty");
  std::vector<bool> in(static_cast<std::size_t>(P.rows()), false);
  for (std::size_t s : S) {
    if (s >= in.size()) throw PreconditionError("target state " + std::to_string(s) + " out of range");
    in[s] = true;
  }
  return in;
}

void require_irreducible(const SparseMatrix& P, const char* what) {
  auto report = check_irreducible(P);
  if (!report.irreducible)
    throw ReducibleChainError(std::string(what) + " requires an irreducible chain (" +
                                  std::to_string(report.components.size()) + " components)",
                              std::move(report.components));
}

HittingSolution to_solution(const StateSet& S, detail::MinimalSolution&& m) {
  return {S, std::move(m.phi), std::move(m.tau), std::move(m.finite)};
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

SubsetDecomposition decompose(const SparseMatrix& P, const Vector& pi, const StateSet& S,
                              const std::function<Vector(std::size_t)>& column, const Tolerances& tol) {
  const ReturnData ret = return_times(P, S, pi, tol);
  const Index n = P.rows();
  SubsetDecomposition out{Vector::Zero(n), 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < S.size(); ++k) {
    out.alpha(static_cast<Index>(S[k])) = pi(static_cast<Index>(S[k])) * ret.tau_plus(static_cast<Index>(k));
  }
  Vector combo = Vector::Zero(n);
  for (std::size_t s : S) combo += out.alpha(static_cast<Index>(s)) * column(s);

  // beta = sum_i alpha_i tau_{k->i} for any k in S.
  out.beta = combo(static_cast<Index>(S.front()));
  for (std::size_t s : S) out.beta_spread = std::max(out.beta_spread, std::abs(combo(static_cast<Index>(s)) - out.beta));
  if (out.beta_spread > tol.beta_constancy * std::max(1.0, std::abs(out.beta)))
    throw InvariantViolation("subset decomposition: beta depends on the probe state (spread " +
                             std::to_string(out.beta_spread) + ")");

  const HittingSolution tS = mean_hitting_times(P, S, tol);
  out.identity_residual = (tS.tau - (combo - Vector::Constant(n, out.beta))).cwiseAbs().maxCoeff();
  if (out.identity_residual > tol.hitting_matrix * std::max(1.0, combo.cwiseAbs().maxCoeff()))
    throw InvariantViolation("subset decomposition identity residual " +
                             std::to_string(out.identity_residual));
  return out;
}

}  // namespace

Vector hitting_probabilities(const SparseMatrix& P, const StateSet& S, const Tolerances& tol) {
  const auto boundary = membership(P, S);
  return detail::solve_minimal(P, boundary, Vector::Zero(P.rows()), tol).phi;
}

HittingSolution mean_hitting_times(const SparseMatrix& P, const StateSet& S, const Tolerances& tol) {
  const auto boundary = membership(P, S);
  return to_solution(S, detail::solve_minimal(P, boundary, Vector::Zero(P.rows()), tol));
}

Vector hitting_probabilities_by_iteration(const SparseMatrix& P, const StateSet& S, const Tolerances& tol) {
  const auto boundary = membership(P, S);
  return detail::solve_minimal_by_iteration(P, boundary, Vector::Zero(P.rows()), tol).phi;
}

HittingSolution mean_hitting_times_by_iteration(const SparseMatrix& P, const StateSet& S,
                                                const Tolerances& tol) {
  const auto boundary = membership(P, S);
  return to_solution(S, detail::solve_minimal_by_iteration(P, boundary, Vector::Zero(P.rows()), tol));
}

ReturnData return_times(const SparseMatrix& P, const StateSet& S, const Vector& pi, const Tolerances& tol) {
  require_irreducible(P, "return_times");
  const HittingSolution hit = mean_hitting_times(P, S, tol);
  ReturnData out{S, Vector(static_cast<Index>(S.size())), 0.0, 0.0};
  double mass = 0.0, weighted = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k) {
    const auto i = static_cast<Index>(S[k]);
    double t = 1.0;
    for (SparseMatrix::InnerIterator it(P, i); it; ++it) t += it.value() * hit.tau(it.col());
    out.tau_plus(static_cast<Index>(k)) = t;
    mass += pi(i);
    weighted += pi(i) * t;
  }
  out.tau_set = weighted / mass;
  out.tau_set_kac = 1.0 / mass;
  if (!close(out.tau_set, out.tau_set_kac, tol.kac))
    throw InvariantViolation("Kac identity failed: return time " + std::to_string(out.tau_set) +
                             " vs 1/pi(S) = " + std::to_string(out.tau_set_kac));
  return out;
}

HittingMatrix hitting_matrix(const SparseMatrix& P, const Vector& pi, const Tolerances& tol) {
  require_irreducible(P, "hitting_matrix");
  const Index n = P.rows();
  HittingMatrix out{Matrix::Zero(n, n), 0.0, 0.0, 0.0};
  for (Index j = 0; j < n; ++j) {
    out.T.col(j) = mean_hitting_times(P, {static_cast<std::size_t>(j)}, tol).tau;
    out.T(j, j) = 0.0;
  }
  const Vector access = out.T * pi;
  out.kemeny = access.mean();
  out.spread = (access.array() - out.kemeny).abs().maxCoeff() / out.kemeny;
  Matrix rhs = Matrix::Ones(n, n);
  rhs.diagonal() -= pi.cwiseInverse();
  out.residual = ((out.T - P * out.T) - rhs).cwiseAbs().maxCoeff();
  if (out.spread > tol.hitting_matrix)
    throw InvariantViolation("random target lemma: relative spread " + std::to_string(out.spread));
  if (out.residual > tol.hitting_matrix)
    throw InvariantViolation("hitting matrix equation residual " + std::to_string(out.residual));
  return out;
}

SubsetDecomposition subset_decomposition(const SparseMatrix& P, const Vector& pi, const StateSet& S,
                                         const Tolerances& tol) {
  return decompose(
      P, pi, S, [&](std::size_t i) { return Vector(mean_hitting_times(P, {i}, tol).tau); }, tol);
}

SubsetDecomposition subset_decomposition(const SparseMatrix& P, const Vector& pi, const StateSet& S,
                                         const Matrix& T, const Tolerances& tol) {
  return decompose(
      P, pi, S, [&](std::size_t i) { return Vector(T.col(static_cast<Index>(i))); }, tol);
}

}  // namespace sorw
