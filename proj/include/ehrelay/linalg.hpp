#pragma once

#include <Eigen/Dense>

namespace ehrelay {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;

/// Max-norm of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Largest |row sum - 1| over all rows.
double row_stochastic_error(const Matrix& m);

/// Modulus of the dominant eigenvalue.
double spectral_radius(const Matrix& m);

/// Solves x * A = b for a row vector x (A square). Returns nullopt-like empty vector
/// when the LU factorization is not invertible.
RowVector solve_left(const Matrix& a, const RowVector& b, bool* invertible = nullptr);

}  // namespace ehrelay
