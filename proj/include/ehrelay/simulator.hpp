#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ehrelay/model.hpp"

namespace ehrelay {

struct SimConfig {
  long slots = 1'000'000;  // total, warmup included
  long warmup = 10'000;
  std::uint64_t seed = 1;
  int replications = 1;
  int batches = 20;   // batch means per replication, for standard errors
  int parallel = 1;   // replications run concurrently when > 1
};

void validate(const SimConfig& config);

/// Exact bookkeeping for one replication, over all slots including warmup.
struct SimCounters {
  long harvested = 0;  // units offered by Gamma draws in EH slots
  long blocked = 0;    // units lost to a full buffer
  long consumed = 0;   // K per transmission attempt
  int initial_qe = 0;
  int final_qe = 0;
  long s_departures = 0;  // packets that left S (direct success or stored at R)
  long delivered_direct = 0;
  long delivered_relay = 0;
  long relay_remaining = 0;
  long max_qd = 0;
};

struct SimStats {
  double throughput = 0.0;
  double throughput_se = 0.0;
  /// HoL-at-S to detected-at-D, both slots included.
  double mean_delay = 0.0;
  double mean_delay_se = 0.0;
  /// As mean_delay, with relayed packets charged an extra half slot.
  double mean_delay_half_slot = 0.0;
  double mean_delay_half_slot_se = 0.0;
  double p_active = 0.0;
  double p_block = 0.0;
  double mean_qd = 0.0;
  double mean_qd_se = 0.0;
  double alpha_bar_emp = 0.0;
  long delivered = 0;
  std::vector<SimCounters> counters;  // one per replication
};

/// One slot of the protocol, for audits against hand-worked realizations.
struct SlotEvent {
  int replication = 0;
  long slot = 0;
  bool dd_mode = false;
  long q_d = 0;  // at slot start
  int q_e = 0;   // at slot start
  bool direct_success = false;
  bool stored = false;
  int harvested = 0;
  int blocked = 0;
  bool transmitted = false;
  bool relay_success = false;
};

using TraceSink = std::function<void(const SlotEvent&)>;

/// Slot-level Monte Carlo. Deterministic for a given config; replication r uses the
/// stream seeded from seed ^ r. A trace sink forces sequential replications.
SimStats run(const SystemParams& params, const Policy& policy, const SimConfig& config,
             const TraceSink& trace = {});

/// One SimStats per policy. With common random numbers every policy sees the same seed.
std::vector<SimStats> run_policy_comparison(const SystemParams& params, const std::vector<Policy>& policies,
                                            const SimConfig& config, bool common_random_numbers = true);

}  // namespace ehrelay
