#include "ehrelay/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace ehrelay {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double row_stochastic_error(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double spectral_radius(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m), /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

RowVector solve_left(const Matrix& a, const RowVector& b, bool* invertible) {
  // x A = b  <=>  A^T x^T = b^T
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a.transpose());
  if (invertible) *invertible = lu.isInvertible();
  return lu.solve(b.transpose()).transpose();
}

}  // namespace ehrelay
