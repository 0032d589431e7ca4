#include "ehrelay/finite_chain.hpp"

#include <deque>

#include "ehrelay/optimizers.hpp"

namespace ehrelay {

namespace {

constexpr double kChainResidualTol = 1e-10;

struct SolveAttempt {
  RowVector pi;
  bool ok = false;
};

SolveAttempt direct_solve(const Matrix& chain) {
  const Eigen::Index n = chain.rows();
  Matrix g = chain - Matrix::Identity(n, n);
  g.col(n - 1).setOnes();
  RowVector rhs = RowVector::Zero(n);
  rhs(n - 1) = 1.0;
  bool invertible = false;
  SolveAttempt out;
  out.pi = solve_left(g, rhs, &invertible);
  if (!invertible || !out.pi.allFinite()) return out;
  const double residual = (out.pi * chain - out.pi).cwiseAbs().maxCoeff();
  out.ok = residual < kChainResidualTol && out.pi.minCoeff() > -kChainResidualTol &&
           std::abs(out.pi.sum() - 1.0) < kChainResidualTol;
  return out;
}

}  // namespace

std::vector<double> level0_alphas(const Policy& policy, const SystemParams& params) {
  validate(policy, params);
  const auto support = policy.support_qd();
  if (!support || *support > 0) {
    // Allowed only if every q_d >= 1 entry is zero.
    for (long qd = 1; qd <= support.value_or(1); ++qd) {
      for (int qe = 0; qe <= params.n_cap; ++qe) {
        if (dd_probability(policy, State{qd, qe}) != 0.0) {
          throw InvalidParams("finite chain needs alpha_s = 0 whenever q_d >= 1");
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(params.phases()));
  for (int qe = 0; qe <= params.n_cap; ++qe) {
    out[static_cast<std::size_t>(qe)] = dd_probability(policy, State{0, qe});
  }
  return out;
}

Matrix build_dynamic_chain(const SystemParams& params, const std::vector<double>& level0_alpha) {
  validate(params);
  const int n = params.phases();
  const EnergyMatrices em = build_energy_matrices(params);
  // Every block is affine in alpha, so a row with alpha_s is the mix of the
  // alpha = 1 and alpha = 0 rows.
  const QbdBlocks decode = build_blocks(em, params, 1.0);
  const QbdBlocks harvest = build_blocks(em, params, 0.0);

  Matrix p = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const double a = level0_alpha[static_cast<std::size_t>(i)];
    p.row(i).head(n) = a * decode.b00.row(i) + (1 - a) * harvest.b00.row(i);
    p.row(i).tail(n) = a * decode.b01.row(i) + (1 - a) * harvest.b01.row(i);
  }
  // Level 1 always harvests; a_up(0) = 0, so nothing leaves {0, 1}.
  p.bottomLeftCorner(n, n) = harvest.a_down;
  p.bottomRightCorner(n, n) = harvest.a_same;
  return p;
}

Matrix build_dynamic_chain(const SystemParams& params, const ThresholdPolicy& policy) {
  return build_dynamic_chain(params, level0_alphas(Policy(policy), params));
}

RowVector solve_stationary(const Matrix& chain, int anchor) {
  SolveAttempt first = direct_solve(chain);
  if (first.ok) return first.pi.cwiseMax(0.0);

  const Eigen::Index n = chain.rows();
  if (anchor < 0) throw SingularChain("direct solve failed and no anchor state was given");
  // States reachable from the anchor form a closed set.
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> members;
  std::deque<int> frontier{anchor};
  index[static_cast<std::size_t>(anchor)] = 0;
  members.push_back(anchor);
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop_front();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (chain(s, t) > 0.0 && index[static_cast<std::size_t>(t)] < 0) {
        index[static_cast<std::size_t>(t)] = static_cast<int>(members.size());
        members.push_back(static_cast<int>(t));
        frontier.push_back(static_cast<int>(t));
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(members.size());
  Matrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = chain(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
    }
  }
  SolveAttempt restricted = direct_solve(sub);
  if (!restricted.ok) {
    throw SingularChain("no unique stationary vector (multiple recurrent classes)");
  }
  RowVector pi = RowVector::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) {
    pi(members[static_cast<std::size_t>(a)]) = std::max(0.0, restricted.pi(a));
  }
  return pi;
}

FiniteChainSolution dynamic_metrics(const SystemParams& params, const std::vector<double>& level0_alpha,
                                    const RowVector& pi) {
  const int n = params.phases();
  const int k = params.k_cost;
  const double ps = params.p_det_s;
  const Vector reach_k = harvest_reaches_k(params);
  const Vector overflow = expected_overflow(params);

  FiniteChainSolution out;
  out.pi = pi;
  double busy = 0.0;
  double blocked = 0.0;
  double active = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = level0_alpha[static_cast<std::size_t>(i)];
    const double empty_i = pi(i);
    const double busy_i = pi(n + i);
    out.alpha_bar += a * empty_i;
    busy += busy_i;
    blocked += ((1 - a) * empty_i + busy_i) * overflow(i);
    active += empty_i * a * (1 - ps) * (i >= k ? 1.0 : 0.0) + busy_i * reach_k(i);
  }
  out.p_active = active;
  out.throughput = (1 - ps) * out.alpha_bar + ps;
  out.mean_qd_slot_start = busy;
  out.mean_qd = 0.5 * (1 - ps) * out.alpha_bar + busy;
  out.delay = (out.mean_qd + 1.0) / out.throughput;
  out.delay_slot_start = (out.mean_qd_slot_start + 1.0) / out.throughput;
  const double lambda_id = (1 - ps) * out.alpha_bar;
  out.delay_at_r = lambda_id > 0.0 ? busy / lambda_id + 1.0 : compute_tn(params);
  const double offered = (1 - out.alpha_bar) * mean_energy(params.energy);
  out.p_block = offered > 0.0 ? blocked / offered : 0.0;
  return out;
}

FiniteChainSolution evaluate_dynamic(const SystemParams& params, const Policy& policy) {
  const std::vector<double> alphas = level0_alphas(policy, params);
  const Matrix chain = build_dynamic_chain(params, alphas);
  const RowVector pi = solve_stationary(chain, chain_index(params, 0, params.n_cap));
  return dynamic_metrics(params, alphas, pi);
}

FiniteChainSolution evaluate_threshold(const SystemParams& params, int e_th, double beta) {
  return evaluate_dynamic(params, Policy::threshold(e_th, beta));
}

}  // namespace ehrelay
