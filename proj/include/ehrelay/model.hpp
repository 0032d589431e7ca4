#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "ehrelay/errors.hpp"

namespace ehrelay {

/// Normalization tolerance for probability vectors.
inline constexpr double kProbTolerance = 1e-12;

/// Distribution of the number of energy units harvested in one EH slot.
class EnergyDistribution {
 public:
  /// Takes gamma_0 .. gamma_bmax. Throws InvalidParams unless it is a probability
  /// vector with at least two entries.
  explicit EnergyDistribution(std::vector<double> probs);

  /// Discrete uniform on {0, ..., b_max}.
  static EnergyDistribution uniform(int b_max);

  int b_max() const { return static_cast<int>(probs_.size()) - 1; }
  double prob(int m) const { return (m < 0 || m > b_max()) ? 0.0 : probs_[static_cast<std::size_t>(m)]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

double mean_energy(const EnergyDistribution& dist);

struct SystemParams {
  double p_det_s = 0.3;  // S-D detection probability
  double p_det_r = 0.9;  // R-D detection probability
  int k_cost = 10;       // energy units per transmission attempt
  int n_cap = 100;       // energy buffer capacity
  EnergyDistribution energy = EnergyDistribution::uniform(5);

  int b_max() const { return energy.b_max(); }
  int phases() const { return n_cap + 1; }
};

/// Throws InvalidParams naming the first violated constraint.
void validate(const SystemParams& params);

/// p_S = 0.3, p_R = 0.9, K = 10, N = 100, uniform b_max = 5.
SystemParams typical_params();

struct State {
  long q_d = 0;  // packets at R
  int q_e = 0;   // energy units at R
};

struct StaticPolicy {
  double alpha = 0.0;
};

/// alpha_s = 1 for (0, q_e > e_th), beta at (0, e_th), 0 otherwise.
struct ThresholdPolicy {
  int e_th = 0;
  double beta = 1.0;
};

/// Arbitrary state-dependent rule; alpha_s = 0 for q_d > max_qd.
struct TabularPolicy {
  int max_qd = 0;
  std::vector<std::vector<double>> alpha;  // [q_d][q_e], q_e in [0, N]
};

class Policy {
 public:
  using Variant = std::variant<StaticPolicy, ThresholdPolicy, TabularPolicy>;

  Policy() : v_(StaticPolicy{}) {}
  Policy(StaticPolicy p) : v_(p) {}
  Policy(ThresholdPolicy p) : v_(p) {}
  Policy(TabularPolicy p) : v_(std::move(p)) {}

  static Policy static_alpha(double alpha) { return Policy(StaticPolicy{alpha}); }
  static Policy threshold(int e_th, double beta) { return Policy(ThresholdPolicy{e_th, beta}); }

  /// Decode whenever q_d = 0 and q_e >= threshold.
  static Policy at_least(int threshold) { return Policy(ThresholdPolicy{threshold, 1.0}); }

  const Variant& variant() const { return v_; }
  bool is_static() const { return std::holds_alternative<StaticPolicy>(v_); }
  bool is_threshold() const { return std::holds_alternative<ThresholdPolicy>(v_); }
  bool is_tabular() const { return std::holds_alternative<TabularPolicy>(v_); }
  const StaticPolicy& as_static() const { return std::get<StaticPolicy>(v_); }
  const ThresholdPolicy& as_threshold() const { return std::get<ThresholdPolicy>(v_); }
  const TabularPolicy& as_tabular() const { return std::get<TabularPolicy>(v_); }

  /// Largest q_d with a possibly non-zero decode probability, or nullopt if unbounded (static).
  std::optional<long> support_qd() const;

 private:
  Variant v_;
};

/// Probability of choosing DD mode in state s.
double dd_probability(const Policy& policy, const State& s);

/// Throws InvalidParams if the policy is inconsistent with params (ranges, table shape).
void validate(const Policy& policy, const SystemParams& params);

}  // namespace ehrelay
