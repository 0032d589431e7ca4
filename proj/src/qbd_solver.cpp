#include "ehrelay/qbd_solver.hpp"

#include <cmath>
#include <limits>

#include "ehrelay/optimizers.hpp"

namespace ehrelay {

namespace {

constexpr double kBoundaryResidualTol = 1e-9;

RowVector stationary_of(const Matrix& p) {
  const Eigen::Index n = p.rows();
  Matrix g = p - Matrix::Identity(n, n);
  g.col(n - 1).setOnes();
  RowVector rhs = RowVector::Zero(n);
  rhs(n - 1) = 1.0;
  return solve_left(g, rhs);
}

}  // namespace

RSolution solve_r(const QbdBlocks& blocks, double tol, long max_iter, RIteration method) {
  const Eigen::Index n = blocks.a_up.rows();
  RSolution out;
  out.r = Matrix::Zero(n, n);
  const Matrix id = Matrix::Identity(n, n);
  Matrix next(n, n);
  for (long it = 1; it <= max_iter; ++it) {
    if (method == RIteration::natural) {
      next.noalias() = blocks.a_same;
      next.noalias() += out.r * blocks.a_down;
      Matrix inner = next;
      next.noalias() = blocks.a_up;
      next.noalias() += out.r * inner;
    } else {
      const Matrix denom = id - blocks.a_same - out.r * blocks.a_down;
      next = (denom.transpose().partialPivLu().solve(blocks.a_up.transpose())).transpose();
    }
    const double diff = max_abs_diff(next, out.r);
    out.r.swap(next);
    out.iterations = it;
    if (diff < tol) return out;
  }
  throw NoConvergence("rate matrix R", max_iter);
}

std::pair<RowVector, RowVector> solve_boundary(const QbdBlocks& blocks, const Matrix& r_matrix,
                                               double stability_margin) {
  const double rho = spectral_radius(r_matrix);
  if (!(rho < 1.0 - stability_margin)) {
    throw Unstable("spectral radius of R is " + std::to_string(rho));
  }
  const Eigen::Index n = r_matrix.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix tail_sum = (id - r_matrix).inverse();  // sum_{l>=0} R^l

  // x = [pi0, pi1]; x G = 0 with one column replaced by the normalization.
  Matrix g(2 * n, 2 * n);
  g.topLeftCorner(n, n) = blocks.b00 - id;
  g.topRightCorner(n, n) = blocks.b01;
  g.bottomLeftCorner(n, n) = blocks.a_down;
  g.bottomRightCorner(n, n) = blocks.a_same + r_matrix * blocks.a_down - id;
  const Matrix balance = g;
  g.col(2 * n - 1).head(n).setOnes();
  g.col(2 * n - 1).tail(n) = tail_sum.rowwise().sum();
  RowVector rhs = RowVector::Zero(2 * n);
  rhs(2 * n - 1) = 1.0;

  bool invertible = false;
  const RowVector x = solve_left(g, rhs, &invertible);
  if (!invertible || !x.allFinite()) {
    throw SingularBoundary("boundary balance equations are rank-deficient");
  }
  const double residual = (x * balance).cwiseAbs().maxCoeff();
  if (residual > kBoundaryResidualTol || x.minCoeff() < -kBoundaryResidualTol) {
    throw SingularBoundary("boundary residual " + std::to_string(residual));
  }
  RowVector pi0 = x.head(n).cwiseMax(0.0);
  RowVector pi1 = x.tail(n).cwiseMax(0.0);
  return {pi0, pi1};
}

double mean_queue_length(const RowVector& /*pi0*/, const RowVector& pi1, const Matrix& r_matrix) {
  const Eigen::Index n = r_matrix.rows();
  const Matrix inv = (Matrix::Identity(n, n) - r_matrix).inverse();
  return (pi1 * inv * inv).sum();
}

QbdSolution solve_qbd(const SystemParams& params, double alpha, const SolverOptions& options) {
  validate(params);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidParams("alpha must lie in [0, 1]");
  return solve_qbd(build_blocks(params, alpha, options.form), options);
}

QbdSolution solve_qbd(const QbdBlocks& blocks, const SolverOptions& options) {
  QbdSolution sol;
  RSolution rs = solve_r(blocks, options.tol, options.max_iter, options.iteration);
  sol.r_matrix = std::move(rs.r);
  sol.iterations = rs.iterations;
  sol.spectral_radius = spectral_radius(sol.r_matrix);
  sol.stable = sol.spectral_radius < 1.0 - options.stability_margin;

  const RowVector phi = stationary_of(blocks.a_up + blocks.a_same + blocks.a_down);
  sol.mean_drift = (phi * blocks.a_down).sum() - (phi * blocks.a_up).sum();

  if (!sol.stable) {
    sol.mean_qd = std::numeric_limits<double>::infinity();
    sol.mean_qd_level0_form = std::numeric_limits<double>::infinity();
    return sol;
  }
  auto [pi0, pi1] = solve_boundary(blocks, sol.r_matrix, options.stability_margin);
  sol.pi0 = std::move(pi0);
  sol.pi1 = std::move(pi1);
  sol.mean_qd = mean_queue_length(sol.pi0, sol.pi1, sol.r_matrix);
  const Eigen::Index n = sol.r_matrix.rows();
  const Matrix inv = (Matrix::Identity(n, n) - sol.r_matrix).inverse();
  sol.mean_qd_level0_form = (sol.pi0 * sol.r_matrix * inv * inv).sum();
  return sol;
}

StaticMetrics static_metrics(const SystemParams& params, double alpha, const QbdSolution& solution) {
  if (!solution.stable) throw Unstable("static metrics need a stable solution");
  const int n = params.phases();
  const int k = params.k_cost;
  const double ps = params.p_det_s;
  const double pr = params.p_det_r;

  const Matrix inv = (Matrix::Identity(n, n) - solution.r_matrix).inverse();
  const RowVector busy = solution.pi1 * inv;  // phase marginal over levels >= 1
  const Vector reach_k = harvest_reaches_k(params);
  const Vector overflow = expected_overflow(params);

  double p_active = 0.0;
  for (int i = 0; i < n; ++i) {
    const double has_k = i >= k ? 1.0 : 0.0;
    p_active += solution.pi0(i) * alpha * (1 - ps) * has_k;
    p_active += busy(i) * (alpha * has_k + (1 - alpha) * reach_k(i));
  }

  StaticMetrics m;
  m.p_active = p_active;
  m.mean_qd = solution.mean_qd;
  const double offered = (1 - alpha) * mean_energy(params.energy);
  const double blocked = (1 - alpha) * ((solution.pi0 + busy) * overflow)(0);
  m.p_block = offered > 0.0 ? blocked / offered : 0.0;
  m.rate_in_d = alpha * (1 - ps);
  m.rate_out_d = p_active * pr;
  m.rate_in_e = offered - blocked;
  m.rate_out_e = p_active * k;
  m.throughput = ps + p_active * pr;
  m.delay = (m.mean_qd + 1.0) / m.throughput;
  m.delay_half_slot = (m.mean_qd + 0.5 * m.rate_in_d + 1.0) / m.throughput;
  m.delay_at_r = m.rate_in_d > 0.0 ? m.mean_qd / m.rate_in_d + 1.0 : compute_tn(params);
  return m;
}

StaticMetrics evaluate_static(const SystemParams& params, double alpha, const SolverOptions& options) {
  return static_metrics(params, alpha, solve_qbd(params, alpha, options));
}

}  // namespace ehrelay
