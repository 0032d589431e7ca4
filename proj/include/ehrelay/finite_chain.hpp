#pragma once

#include <vector>

#include "ehrelay/linalg.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/qbd_builder.hpp"

namespace ehrelay {

/// Stationary analysis of policies that only decode while R is empty, so q_d stays in
/// {0, 1}. States are ordered (0,0)..(0,N),(1,0)..(1,N).
struct FiniteChainSolution {
  RowVector pi;
  double alpha_bar = 0.0;
  double p_active = 0.0;
  double throughput = 0.0;
  /// Half-slot accounting: a packet decoded at R counts 1/2 during its arrival slot.
  double mean_qd = 0.0;
  double delay = 0.0;
  /// Slot-start accounting: occupancy sampled at the start of each slot.
  double mean_qd_slot_start = 0.0;
  double delay_slot_start = 0.0;
  double delay_at_r = 0.0;  // slots at R per relayed packet, arrival slot included
  double p_block = 0.0;
};

/// Index of (q_d, q_e) in the 2(N+1) ordering.
inline int chain_index(const SystemParams& params, int q_d, int q_e) { return q_d * params.phases() + q_e; }

/// Decode probabilities of a policy on the empty-relay states (0, q_e), q_e = 0..N.
/// Throws InvalidParams if the policy can decode with q_d >= 1.
std::vector<double> level0_alphas(const Policy& policy, const SystemParams& params);

Matrix build_dynamic_chain(const SystemParams& params, const std::vector<double>& level0_alpha);
Matrix build_dynamic_chain(const SystemParams& params, const ThresholdPolicy& policy);

/// pi P = pi, sum pi = 1. Falls back to the closed class reachable from `anchor` when
/// the chain has transient states that make the direct solve ill-posed; throws
/// SingularChain when no unique stationary vector exists.
RowVector solve_stationary(const Matrix& chain, int anchor = -1);

FiniteChainSolution dynamic_metrics(const SystemParams& params, const std::vector<double>& level0_alpha,
                                    const RowVector& pi);

/// build + solve + metrics.
FiniteChainSolution evaluate_dynamic(const SystemParams& params, const Policy& policy);
FiniteChainSolution evaluate_threshold(const SystemParams& params, int e_th, double beta);

}  // namespace ehrelay
