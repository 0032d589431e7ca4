#include "ehrelay/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ehrelay {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

EnergyDistribution::EnergyDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw InvalidParams("energy distribution needs b_max >= 1");
  }
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidParams("energy probabilities must be non-negative");
    }
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw InvalidParams("energy probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

EnergyDistribution EnergyDistribution::uniform(int b_max) {
  if (b_max < 1) {
    throw InvalidParams("uniform energy needs b_max >= 1");
  }
  return EnergyDistribution(std::vector<double>(static_cast<std::size_t>(b_max) + 1, 1.0 / (b_max + 1)));
}

double mean_energy(const EnergyDistribution& dist) {
  double mean = 0.0;
  for (int m = 0; m <= dist.b_max(); ++m) {
    mean += m * dist.prob(m);
  }
  return mean;
}

void validate(const SystemParams& params) {
  if (!(params.p_det_s > 0.0 && params.p_det_s < 1.0)) {
    throw InvalidParams("p_det_s must lie in (0, 1)");
  }
  if (!(params.p_det_r > 0.0 && params.p_det_r <= 1.0)) {
    throw InvalidParams("p_det_r must lie in (0, 1]");
  }
  if (params.k_cost < 1) {
    throw InvalidParams("K must be >= 1");
  }
  if (params.b_max() > params.k_cost) {
    throw InvalidParams("b_max > K (need b_max <= K)");
  }
  if (params.n_cap < 2 * params.k_cost) {
    throw InvalidParams("N < 2K (need N >= 2K)");
  }
}

SystemParams typical_params() {
  SystemParams p;
  p.p_det_s = 0.3;
  p.p_det_r = 0.9;
  p.k_cost = 10;
  p.n_cap = 100;
  p.energy = EnergyDistribution::uniform(5);
  return p;
}

std::optional<long> Policy::support_qd() const {
  if (is_static()) {
    return as_static().alpha > 0.0 ? std::nullopt : std::optional<long>(0);
  }
  if (is_threshold()) {
    return 0;
  }
  return as_tabular().max_qd;
}

double dd_probability(const Policy& policy, const State& s) {
  const auto& v = policy.variant();
  if (const auto* st = std::get_if<StaticPolicy>(&v)) {
    return st->alpha;
  }
  if (const auto* th = std::get_if<ThresholdPolicy>(&v)) {
    if (s.q_d != 0) return 0.0;
    if (s.q_e > th->e_th) return 1.0;
    if (s.q_e == th->e_th) return th->beta;
    return 0.0;
  }
  const auto& tab = std::get<TabularPolicy>(v);
  if (s.q_d < 0 || s.q_d > tab.max_qd) return 0.0;
  const auto& row = tab.alpha[static_cast<std::size_t>(s.q_d)];
  if (s.q_e < 0 || static_cast<std::size_t>(s.q_e) >= row.size()) return 0.0;
  return row[static_cast<std::size_t>(s.q_e)];
}

void validate(const Policy& policy, const SystemParams& params) {
  const auto& v = policy.variant();
  if (const auto* st = std::get_if<StaticPolicy>(&v)) {
    if (!is_probability(st->alpha)) throw InvalidParams("static alpha must lie in [0, 1]");
    return;
  }
  if (const auto* th = std::get_if<ThresholdPolicy>(&v)) {
    if (th->e_th < 0 || th->e_th > params.n_cap) throw InvalidParams("e_th must lie in [0, N]");
    if (!is_probability(th->beta)) throw InvalidParams("beta must lie in [0, 1]");
    return;
  }
  const auto& tab = std::get<TabularPolicy>(v);
  if (tab.max_qd < 0 || tab.alpha.size() != static_cast<std::size_t>(tab.max_qd) + 1) {
    throw InvalidParams("tabular policy needs max_qd + 1 rows");
  }
  for (const auto& row : tab.alpha) {
    if (row.size() != static_cast<std::size_t>(params.phases())) {
      throw InvalidParams("tabular policy rows need N + 1 entries");
    }
    for (double a : row) {
      if (!is_probability(a)) throw InvalidParams("tabular alpha must lie in [0, 1]");
    }
  }
}

}  // namespace ehrelay
