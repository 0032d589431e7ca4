#include "ehrelay/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "ehrelay/finite_chain.hpp"
#include "ehrelay/golden_section.hpp"

namespace ehrelay {

namespace {

// Static candidates are pulled back from the singular point alpha^T.
constexpr double kBoundaryBackoff = 1e-6;
constexpr double kTieTolerance = 1e-9;

struct ThresholdBest {
  int e_th = 0;
  double beta = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace;
  int evaluations = 0;
};

ThresholdBest search_beta(const SystemParams& params, int e_th, double eps, DelayConvention convention) {
  ThresholdBest best;
  best.e_th = e_th;
  auto tau = [&](double beta) { return threshold_delay(params, e_th, beta, convention); };
  const GoldenSectionResult gs = golden_section(tau, 0.0, 1.0, eps);
  for (const auto& [beta, value] : gs.trace) {
    best.trace.push_back({Policy::threshold(e_th, beta), value});
  }
  best.evaluations = gs.evaluations;
  // The minimum of a convex tau may sit on either end of the final bracket; beta = 1
  // stays an endpoint whenever tau is decreasing.
  for (double beta : {gs.lo, gs.hi}) {
    const double value = tau(beta);
    ++best.evaluations;
    best.trace.push_back({Policy::threshold(e_th, beta), value});
    if (value <= best.objective) {
      best.objective = value;
      best.beta = beta;
    }
  }
  return best;
}

}  // namespace

double alpha_t(const SystemParams& params) {
  const double harvest = mean_energy(params.energy) * params.p_det_r;
  const double denom = harvest + params.k_cost * (1 - params.p_det_s);
  return denom > 0.0 ? harvest / denom : 0.0;
}

double compute_tn(const SystemParams& params) {
  if (!(params.p_det_r > 0.0)) throw NonAbsorbing("p_det_r = 0: R never delivers");
  const int n = params.phases();
  const int k = params.k_cost;
  // h(q): expected slots to delivery from start-of-slot energy q, R in EH mode.
  Matrix lhs = Matrix::Identity(n, n);
  for (int q = 0; q < n; ++q) {
    for (int m = 0; m <= params.b_max(); ++m) {
      const double g = params.energy.prob(m);
      const int after = std::min(q + m, params.n_cap);
      if (after >= k) {
        lhs(q, after - k) -= g * (1 - params.p_det_r);
      } else {
        lhs(q, after) -= g;
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(lhs)};
  if (!lu.isInvertible()) throw NonAbsorbing("delivery is not certain from every energy level");
  const Vector h = lu.solve(Vector::Ones(n));
  const double t_n = h(params.n_cap);
  if (!std::isfinite(t_n) || t_n < 1.0 - 1e-12) throw NonAbsorbing("absorption time is not finite");
  // Harvesting at a full buffer is a no-op, so h(N) is the arrival-slot start.
  return t_n;
}

bool noncoop_check(const SystemParams& params) { return compute_tn(params) > 1.0 / params.p_det_s; }

double static_delay(const SystemParams& params, double alpha, DelayConvention convention,
                    const SolverOptions& solver) {
  const QbdSolution sol = solve_qbd(params, alpha, solver);
  if (!sol.stable) return std::numeric_limits<double>::infinity();
  const StaticMetrics m = static_metrics(params, alpha, sol);
  return convention == DelayConvention::slot_start ? m.delay : m.delay_half_slot;
}

double threshold_delay(const SystemParams& params, int e_th, double beta, DelayConvention convention) {
  const FiniteChainSolution s = evaluate_threshold(params, e_th, beta);
  return convention == DelayConvention::slot_start ? s.delay_slot_start : s.delay;
}

OptimizationResult optimize_static(const SystemParams& params, double eps, DelayConvention convention,
                                   const SolverOptions& solver) {
  validate(params);
  if (!(eps > 0.0)) throw InvalidParams("eps must be positive");
  OptimizationResult out;
  if (noncoop_check(params)) {
    out.best_policy = Policy::static_alpha(0.0);
    out.objective = 1.0 / params.p_det_s;
    out.cooperation = false;
    return out;
  }
  const double upper = alpha_t(params);
  const double cap = std::max(0.0, upper - kBoundaryBackoff);
  auto tau = [&](double alpha) { return static_delay(params, std::min(alpha, cap), convention, solver); };

  const GoldenSectionResult gs = golden_section(tau, 0.0, upper, eps);
  for (const auto& [alpha, value] : gs.trace) {
    out.search_trace.push_back({Policy::static_alpha(std::min(alpha, cap)), value});
  }
  const double best_alpha = std::min(gs.midpoint(), cap);
  out.best_policy = Policy::static_alpha(best_alpha);
  out.objective = tau(best_alpha);
  out.evaluations = gs.evaluations + 1;
  out.cooperation = best_alpha > 0.0;
  return out;
}

OptimizationResult optimize_dynamic(const SystemParams& params, double eps, DelayConvention convention,
                                    int parallel) {
  validate(params);
  if (!(eps > 0.0)) throw InvalidParams("eps must be positive");
  OptimizationResult out;
  out.best_policy = Policy::threshold(params.n_cap, 0.0);
  out.objective = 1.0 / params.p_det_s;
  out.cooperation = false;
  if (noncoop_check(params)) return out;

  const int first = params.n_cap;
  const int last = std::max(0, params.n_cap - params.b_max() + 1);
  std::vector<ThresholdBest> results;
  if (parallel > 1) {
    std::vector<std::future<ThresholdBest>> jobs;
    for (int e_th = first; e_th >= last; --e_th) {
      jobs.push_back(std::async(std::launch::async, search_beta, std::cref(params), e_th, eps, convention));
    }
    for (auto& job : jobs) results.push_back(job.get());
  } else {
    for (int e_th = first; e_th >= last; --e_th) {
      results.push_back(search_beta(params, e_th, eps, convention));
    }
  }
  // Results are in decreasing e_th, so strict improvement keeps the larger e_th on ties.
  for (ThresholdBest& r : results) {
    out.evaluations += r.evaluations;
    std::move(r.trace.begin(), r.trace.end(), std::back_inserter(out.search_trace));
    if (r.objective < out.objective - kTieTolerance) {
      out.objective = r.objective;
      out.best_policy = Policy::threshold(r.e_th, r.beta);
      out.cooperation = true;
    }
  }
  return out;
}

Policy throughput_optimal_dynamic(const SystemParams& params, std::optional<int> e_th) {
  validate(params);
  const int bound = params.n_cap - params.b_max() + 1;
  const int chosen = e_th.value_or(bound);
  if (chosen > bound) {
    throw InvalidThreshold("e_th = " + std::to_string(chosen) + " exceeds N - b_max + 1 = " + std::to_string(bound));
  }
  if (chosen < 0) throw InvalidThreshold("e_th must be non-negative");
  return Policy::threshold(chosen, 1.0);
}

}  // namespace ehrelay
