#pragma once

#include "ehrelay/linalg.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/qbd_builder.hpp"

namespace ehrelay {

enum class RIteration {
  natural,      // R <- A0 + R A1 + R^2 A2
  traditional,  // R <- A0 (I - A1 - R A2)^{-1}
};

struct SolverOptions {
  double tol = 1e-12;
  long max_iter = 1'000'000;
  double stability_margin = 1e-6;
  RIteration iteration = RIteration::natural;
  BlockForm form = BlockForm::energy_gated;
};

struct RSolution {
  Matrix r;
  long iterations = 0;
};

struct QbdSolution {
  Matrix r_matrix;
  RowVector pi0;  // level-0 phases
  RowVector pi1;  // level-1 phases; pi_l = pi1 R^{l-1}
  double spectral_radius = 0.0;
  bool stable = false;
  double mean_qd = 0.0;  // sum_l l pi_l 1 with the pi1-anchored geometric tail
  /// pi0 R (I-R)^{-2} 1, i.e. the tail anchored at level 0. Reported for comparison only.
  double mean_qd_level0_form = 0.0;
  /// phi A2 1 - phi A0 1 with phi stationary for A0 + A1 + A2; > 0 means positive recurrent.
  double mean_drift = 0.0;
  long iterations = 0;
};

struct StaticMetrics {
  double p_active = 0.0;
  double p_block = 0.0;
  double throughput = 0.0;
  double mean_qd = 0.0;
  double delay = 0.0;            // (mean_qd + 1) / throughput
  double delay_half_slot = 0.0;  // (mean_qd + lambda_id / 2 + 1) / throughput
  double delay_at_r = 0.0;       // slots at R per relayed packet, arrival slot included
  double rate_in_d = 0.0;
  double rate_out_d = 0.0;
  double rate_in_e = 0.0;
  double rate_out_e = 0.0;
};

/// Minimal non-negative solution of R = a_up + R a_same + R^2 a_down, iterated from zero.
/// Throws NoConvergence when max_iter is exhausted.
RSolution solve_r(const QbdBlocks& blocks, double tol, long max_iter, RIteration method = RIteration::natural);

/// Returns (pi0, pi1). Throws Unstable if rho(R) >= 1 - margin, SingularBoundary if the
/// balance system has no unique solution.
std::pair<RowVector, RowVector> solve_boundary(const QbdBlocks& blocks, const Matrix& r_matrix,
                                               double stability_margin = 1e-6);

/// pi1 (I - R)^{-2} 1.
double mean_queue_length(const RowVector& pi0, const RowVector& pi1, const Matrix& r_matrix);

/// Full pipeline for a static policy. Does not throw on instability: the solution is
/// flagged instead and mean_qd is +inf.
QbdSolution solve_qbd(const SystemParams& params, double alpha, const SolverOptions& options = {});
QbdSolution solve_qbd(const QbdBlocks& blocks, const SolverOptions& options = {});

/// Throws Unstable if the solution is not stable.
StaticMetrics static_metrics(const SystemParams& params, double alpha, const QbdSolution& solution);

/// Convenience: solve + metrics.
StaticMetrics evaluate_static(const SystemParams& params, double alpha, const SolverOptions& options = {});

}  // namespace ehrelay
