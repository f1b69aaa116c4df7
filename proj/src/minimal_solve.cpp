#include "sorw/detail/minimal_solve.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>

#include "sorw/error.hpp"

namespace sorw::detail {

namespace {

using Index = Eigen::Index;
constexpr double inf = std::numeric_limits<double>::infinity();

// Marks every interior state with an interior path (possibly empty, when the
// state is itself a seed) to one of the seeds.
std::vector<bool> reverse_reach(const SparseMatrix& predecessors, const std::vector<bool>& seeds,
                                const std::vector<bool>& interior) {
  const std::size_t n = seeds.size();
  std::vector<bool> mark(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (seeds[v]) {
      queue.push_back(v);
      if (interior[v]) mark[v] = true;
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (SparseMatrix::InnerIterator it(predecessors, static_cast<Index>(v)); it; ++it) {
      const auto u = static_cast<std::size_t>(it.col());
      if (it.value() > 0.0 && interior[u] && !mark[u]) {
        mark[u] = true;
        queue.push_back(u);
      }
    }
  }
  return mark;
}

// Solves x_i = rhs_i + sum_{j in members} P_ij x_j over `members`. The
// caller guarantees the restricted matrix is transient.
Vector solve_block(const SparseMatrix& P, const std::vector<bool>& members, const Vector& rhs,
                   const Tolerances& tol) {
  const std::size_t n = members.size();
  std::vector<Index> local(n, -1);
  std::vector<std::size_t> global;
  for (std::size_t i = 0; i < n; ++i) {
    if (members[i]) {
      local[i] = static_cast<Index>(global.size());
      global.push_back(i);
    }
  }
  const auto m = static_cast<Index>(global.size());
  Vector x = Vector::Zero(n);
  if (m == 0) return x;

  std::vector<Eigen::Triplet<double>> t;
  Vector b(m);
  for (Index r = 0; r < m; ++r) {
    const std::size_t i = global[static_cast<std::size_t>(r)];
    b(r) = rhs(static_cast<Index>(i));
    t.emplace_back(r, r, 1.0);
    for (SparseMatrix::InnerIterator it(P, static_cast<Index>(i)); it; ++it) {
      const Index c = local[static_cast<std::size_t>(it.col())];
      if (c >= 0) t.emplace_back(r, c, -it.value());
    }
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  Vector y;
  bool ok = lu.info() == Eigen::Success;
  if (ok) {
    y = lu.solve(b);
    ok = lu.info() == Eigen::Success && y.allFinite();
    if (ok) y += lu.solve(b - A * y);  // one step of refinement
  }
  if (!ok) {
    // Value iteration from zero on the same block.
    y = Vector::Zero(m);
    Eigen::SparseMatrix<double> I(m, m);
    I.setIdentity();
    const Eigen::SparseMatrix<double, Eigen::RowMajor> Q = I - A;
    std::size_t sweep = 0;
    for (; sweep < tol.max_sweeps; ++sweep) {
      Vector next = b + Q * y;
      const double change = (next - y).cwiseAbs().maxCoeff();
      y.swap(next);
      if (change <= tol.iteration * std::max(1.0, y.cwiseAbs().maxCoeff())) break;
      if (y.maxCoeff() > tol.divergence) throw InvariantViolation("hitting system diverged");
    }
    if (sweep == tol.max_sweeps) throw InvariantViolation("hitting system: iteration did not converge");
  }
  for (Index r = 0; r < m; ++r) x(static_cast<Index>(global[static_cast<std::size_t>(r)])) = y(r);
  return x;
}

}  // namespace

MinimalSolution solve_minimal(const SparseMatrix& P, const std::vector<bool>& boundary,
                              const Vector& boundary_tau, const Tolerances& tol) {
  const std::size_t n = boundary.size();
  std::vector<bool> interior(n);
  for (std::size_t i = 0; i < n; ++i) interior[i] = !boundary[i];
  const SparseMatrix predecessors = P.transpose();

  const auto can_exit = reverse_reach(predecessors, boundary, interior);
  std::vector<bool> trapped(n, false);
  for (std::size_t i = 0; i < n; ++i) trapped[i] = interior[i] && !can_exit[i];
  const auto doomed = reverse_reach(predecessors, trapped, interior);

  MinimalSolution sol{Vector::Zero(static_cast<Index>(n)), Vector::Zero(static_cast<Index>(n)),
                      std::vector<bool>(n, true)};
  std::vector<bool> sure(n, false);     // interior, absorbed with probability one
  std::vector<bool> partial(n, false);  // interior, 0 < phi < 1
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Index>(i);
    if (boundary[i]) {
      sol.phi(k) = 1.0;
      sol.tau(k) = boundary_tau(k);
      continue;
    }
    sure[i] = !doomed[i];
    partial[i] = doomed[i] && can_exit[i];
    if (sure[i]) sol.phi(k) = 1.0;
    if (doomed[i]) {
      sol.tau(k) = inf;
      sol.finite[i] = false;
    }
  }

  Vector rhs_phi = Vector::Zero(static_cast<Index>(n));
  Vector rhs_tau = Vector::Zero(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Index>(i);
    if (!partial[i] && !sure[i]) continue;
    for (SparseMatrix::InnerIterator it(P, k); it; ++it) {
      const auto j = static_cast<std::size_t>(it.col());
      if (partial[i] && (boundary[j] || sure[j])) rhs_phi(k) += it.value();
      if (sure[i] && boundary[j]) rhs_tau(k) += it.value() * boundary_tau(it.col());
    }
    if (sure[i]) rhs_tau(k) += 1.0;
  }

  const Vector phi_partial = solve_block(P, partial, rhs_phi, tol);
  const Vector tau_sure = solve_block(P, sure, rhs_tau, tol);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Index>(i);
    if (partial[i]) sol.phi(k) = std::clamp(phi_partial(k), 0.0, 1.0);
    if (sure[i]) sol.tau(k) = tau_sure(k);
  }
  return sol;
}

MinimalSolution solve_minimal_by_iteration(const SparseMatrix& P, const std::vector<bool>& boundary,
                                           const Vector& boundary_tau, const Tolerances& tol) {
  const std::size_t n = boundary.size();
  const auto N = static_cast<Index>(n);
  MinimalSolution sol{Vector::Zero(N), Vector::Zero(N), std::vector<bool>(n, true)};

  // phi: iterate from zero with the boundary clamped to one.
  Vector x = Vector::Zero(N);
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary[i]) x(static_cast<Index>(i)) = 1.0;
  }
  for (std::size_t sweep = 0; sweep < tol.max_sweeps; ++sweep) {
    Vector next = P * x;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Index>(i);
      if (boundary[i]) {
        next(k) = 1.0;
        continue;
      }
      assert(next(k) >= x(k) - 1e-15);
      change = std::max(change, std::abs(next(k) - x(k)));
    }
    x.swap(next);
    if (change <= tol.iteration) break;
  }
  sol.phi = x;

  // tau on the states whose phi has converged to one.
  constexpr double sure_threshold = 1e-6;
  std::vector<bool> active(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Index>(i);
    if (boundary[i]) continue;
    if (sol.phi(k) >= 1.0 - sure_threshold) {
      active[i] = true;
    } else {
      sol.finite[i] = false;
      sol.tau(k) = inf;
    }
  }
  Vector t = Vector::Zero(N);
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary[i]) t(static_cast<Index>(i)) = boundary_tau(static_cast<Index>(i));
  }
  for (std::size_t sweep = 0; sweep < tol.max_sweeps; ++sweep) {
    double change = 0.0, scale = 1.0;
    Vector next = t;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const auto k = static_cast<Index>(i);
      double v = 1.0;
      for (SparseMatrix::InnerIterator it(P, k); it; ++it) {
        const auto j = static_cast<std::size_t>(it.col());
        if (boundary[j] || active[j]) v += it.value() * t(it.col());
      }
      assert(v >= t(k) - 1e-12);
      change = std::max(change, std::abs(v - t(k)));
      scale = std::max(scale, std::abs(v));
      next(k) = v;
    }
    t.swap(next);
    if (change <= tol.iteration * scale) break;
    if (scale > tol.divergence) {
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i] && t(static_cast<Index>(i)) > tol.divergence) {
          sol.finite[i] = false;
          active[i] = false;
          t(static_cast<Index>(i)) = inf;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary[i] || active[i]) sol.tau(static_cast<Index>(i)) = t(static_cast<Index>(i));
  }
  return sol;
}

}  // namespace sorw::detail
