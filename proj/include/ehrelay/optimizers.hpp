#pragma once

#include <optional>
#include <vector>

#include "ehrelay/model.hpp"
#include "ehrelay/qbd_solver.hpp"

namespace ehrelay {

/// How R's occupancy enters tau = (q_d + 1) / lambda_S.
///   slot_start: q_d sampled at slot boundaries; equals the simulated per-packet delay.
///   half_slot:  a packet decoded at R also counts 1/2 during its arrival slot.
enum class DelayConvention { slot_start, half_slot };

struct TraceEntry {
  Policy candidate;
  double objective = 0.0;
};

struct OptimizationResult {
  Policy best_policy;
  double objective = 0.0;
  bool cooperation = false;
  std::vector<TraceEntry> search_trace;
  int evaluations = 0;
};

/// Static decode probability that puts R's data queue at the boundary of stability.
double alpha_t(const SystemParams& params);

/// Expected slots for R to deliver one packet that arrives with a full energy buffer,
/// harvesting in every later slot. The arrival slot counts as one.
double compute_tn(const SystemParams& params);

/// True when non-cooperation is delay-optimal (t_N > 1 / p_det_s).
bool noncoop_check(const SystemParams& params);

/// Static-policy delay for the given convention; +inf when unstable.
double static_delay(const SystemParams& params, double alpha, DelayConvention convention,
                    const SolverOptions& solver = {});

/// Threshold-policy delay for the given convention.
double threshold_delay(const SystemParams& params, int e_th, double beta, DelayConvention convention);

/// Golden-section over alpha in [0, alpha^T].
OptimizationResult optimize_static(const SystemParams& params, double eps = 0.01,
                                   DelayConvention convention = DelayConvention::slot_start,
                                   const SolverOptions& solver = {});

/// Exhaustive e_th in {N-b_max+1..N} with golden-section over beta.
OptimizationResult optimize_dynamic(const SystemParams& params, double eps = 0.01,
                                    DelayConvention convention = DelayConvention::half_slot, int parallel = 1);

/// Threshold policy with beta = 1 and decode whenever q_e >= e_th (default N - b_max + 1).
/// Throws InvalidThreshold above that bound.
Policy throughput_optimal_dynamic(const SystemParams& params, std::optional<int> e_th = std::nullopt);

}  // namespace ehrelay
