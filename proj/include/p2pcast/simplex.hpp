#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

namespace p2pcast {

enum class LpStatus { optimal, unbounded, iteration_limit };

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  Scalar value = 0;
  Eigen::Vector<Scalar, Eigen::Dynamic> x;     // primal solution
  Eigen::Vector<Scalar, Eigen::Dynamic> dual;  // one multiplier per row
  Scalar dual_value = 0;
  int pivots = 0;
};

// Dense tableau simplex for  max c'x  s.t.  Ax <= b, x >= 0  with b >= 0,
// so the slack basis is feasible and no phase-1 is needed. Pivoting uses
// Bland's rule throughout: the instances this project builds are heavily
// degenerate (many zero right-hand sides) and Bland keeps the walk finite
// and bit-reproducible.
template <typename Scalar = double>
LpSolution<Scalar> lp_maximize(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& b,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& c,
    int max_pivots = 0) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("lp dimension mismatch");
  if (m > 0 && b.minCoeff() < Scalar(0))
    throw std::invalid_argument("lp requires b >= 0");
  const Scalar tol = Scalar(1e-9);
  if (max_pivots <= 0) max_pivots = 20000 + 200 * (n + m);

  // Tableau: [A | I | b] with the objective row [c | 0 | 0] at the bottom.
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  t.block(0, 0, m, n) = A;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = b;
  t.row(m).head(n) = c.transpose();

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  LpSolution<Scalar> sol;
  for (;;) {
    // Bland: entering variable = lowest index with positive reduced cost.
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t(m, j) > tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      sol.status = LpStatus::optimal;
      break;
    }

    int leave = -1;
    Scalar best = 0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) <= tol) continue;
      const Scalar rhs = t(i, n + m) < Scalar(0) ? Scalar(0) : t(i, n + m);
      const Scalar ratio = rhs / t(i, enter);
      if (leave < 0 || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) {
      sol.status = LpStatus::unbounded;
      return sol;
    }

    t.row(leave) /= t(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const Scalar f = t(i, enter);
      if (f != Scalar(0)) t.row(i) -= f * t.row(leave);
    }
    basis[leave] = enter;

    if (++sol.pivots >= max_pivots) {
      sol.status = LpStatus::iteration_limit;
      return sol;
    }
  }

  sol.x.setZero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = t(i, n + m);
  sol.value = -t(m, n + m);
  sol.dual = -t.row(m).segment(n, m).transpose();
  sol.dual_value = sol.dual.dot(b);
  return sol;
}

}  // namespace p2pcast
