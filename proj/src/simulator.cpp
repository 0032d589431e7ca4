#include "ehrelay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <random>

namespace ehrelay {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct BatchSums {
  long slots = 0;
  long delivered = 0;
  double delay = 0.0;
  double delay_half = 0.0;
  double qd = 0.0;
};

struct ReplicationResult {
  std::vector<BatchSums> batches;
  long measured_slots = 0;
  long dd_slots = 0;
  long active_slots = 0;
  long offered = 0;
  long blocked = 0;
  SimCounters counters;
};

int draw_energy(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

ReplicationResult replicate(const SystemParams& params, const Policy& policy, const SimConfig& config, int rep,
                            const TraceSink& trace) {
  Stream rng(config.seed ^ static_cast<std::uint64_t>(rep));
  std::vector<double> cdf;
  double acc = 0.0;
  for (double p : params.energy.probs()) cdf.push_back(acc += p);

  ReplicationResult out;
  out.batches.resize(static_cast<std::size_t>(config.batches));
  const long measured = config.slots - config.warmup;
  const long batch_len = std::max(1L, measured / config.batches);

  std::deque<long> relay_fifo;  // HoL-start slot of each packet stored at R
  long hol_start = 0;
  int qe = 0;
  SimCounters& c = out.counters;
  c.initial_qe = qe;

  for (long t = 0; t < config.slots; ++t) {
    // Four draws per slot regardless of outcome keep streams aligned across policies.
    const double u_mode = rng.uniform();
    const double u_direct = rng.uniform();
    const double u_energy = rng.uniform();
    const double u_relay = rng.uniform();

    const long qd = static_cast<long>(relay_fifo.size());
    const bool measuring = t >= config.warmup;
    BatchSums* batch = nullptr;
    if (measuring) {
      const auto b = std::min<long>((t - config.warmup) / batch_len, config.batches - 1);
      batch = &out.batches[static_cast<std::size_t>(b)];
      ++batch->slots;
      batch->qd += static_cast<double>(qd);
    }
    SlotEvent ev;
    ev.replication = rep;
    ev.slot = t;
    ev.q_d = qd;
    ev.q_e = qe;

    const bool dd = u_mode < dd_probability(policy, State{qd, qe});
    ev.dd_mode = dd;

    // Subslot 1: S transmits; D's ACK preempts storage at R.
    if (u_direct < params.p_det_s) {
      ev.direct_success = true;
      ++c.s_departures;
      ++c.delivered_direct;
      if (batch) {
        const double d = static_cast<double>(t - hol_start + 1);
        ++batch->delivered;
        batch->delay += d;
        batch->delay_half += d;
      }
      hol_start = t + 1;
    } else if (dd) {
      ev.stored = true;
      ++c.s_departures;
      relay_fifo.push_back(hol_start);
      hol_start = t + 1;
    }
    if (!dd) {
      const int gamma = draw_energy(cdf, u_energy);
      const int stored = std::min(gamma, params.n_cap - qe);
      qe += stored;
      c.harvested += gamma;
      c.blocked += gamma - stored;
      ev.harvested = gamma;
      ev.blocked = gamma - stored;
      if (measuring) {
        out.offered += gamma;
        out.blocked += gamma - stored;
      }
    }
    c.max_qd = std::max<long>(c.max_qd, static_cast<long>(relay_fifo.size()));

    // Subslot 2: R transmits its HoL packet if it can pay K.
    if (!relay_fifo.empty() && qe >= params.k_cost) {
      qe -= params.k_cost;
      c.consumed += params.k_cost;
      ev.transmitted = true;
      if (measuring) ++out.active_slots;
      if (u_relay < params.p_det_r) {
        ev.relay_success = true;
        ++c.delivered_relay;
        if (batch) {
          const double d = static_cast<double>(t - relay_fifo.front() + 1);
          ++batch->delivered;
          batch->delay += d;
          batch->delay_half += d + 0.5;
        }
        relay_fifo.pop_front();
      }
    }
    if (measuring) {
      ++out.measured_slots;
      if (dd) ++out.dd_slots;
    }
    if (trace) trace(ev);
  }
  c.final_qe = qe;
  c.relay_remaining = static_cast<long>(relay_fifo.size());
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe batch_estimate(const std::vector<double>& values, double pooled) {
  MeanSe out;
  out.mean = pooled;
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.se = std::sqrt(ss / (n - 1) / n);
  return out;
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.slots <= 0) throw InvalidParams("slots must be positive");
  if (config.warmup < 0 || config.warmup >= config.slots) throw InvalidParams("need 0 <= warmup < slots");
  if (config.replications < 1) throw InvalidParams("replications must be >= 1");
  if (config.batches < 1 || config.batches > config.slots - config.warmup) {
    throw InvalidParams("batches must lie in [1, measured slots]");
  }
}

SimStats run(const SystemParams& params, const Policy& policy, const SimConfig& config, const TraceSink& trace) {
  validate(params);
  validate(policy, params);
  validate(config);

  std::vector<ReplicationResult> reps;
  if (config.parallel > 1 && !trace && config.replications > 1) {
    std::vector<std::future<ReplicationResult>> jobs;
    for (int r = 0; r < config.replications; ++r) {
      jobs.push_back(std::async(std::launch::async, replicate, std::cref(params), std::cref(policy),
                                std::cref(config), r, std::cref(trace)));
    }
    for (auto& j : jobs) reps.push_back(j.get());
  } else {
    for (int r = 0; r < config.replications; ++r) reps.push_back(replicate(params, policy, config, r, trace));
  }

  SimStats s;
  BatchSums total;
  long measured = 0, dd = 0, active = 0, offered = 0, blocked = 0;
  std::vector<double> thr, delay, delay_half, qd;
  for (const auto& r : reps) {
    for (const auto& b : r.batches) {
      if (b.slots == 0) continue;
      total.slots += b.slots;
      total.delivered += b.delivered;
      total.delay += b.delay;
      total.delay_half += b.delay_half;
      total.qd += b.qd;
      thr.push_back(static_cast<double>(b.delivered) / static_cast<double>(b.slots));
      qd.push_back(b.qd / static_cast<double>(b.slots));
      if (b.delivered > 0) {
        delay.push_back(b.delay / static_cast<double>(b.delivered));
        delay_half.push_back(b.delay_half / static_cast<double>(b.delivered));
      }
    }
    measured += r.measured_slots;
    dd += r.dd_slots;
    active += r.active_slots;
    offered += r.offered;
    blocked += r.blocked;
    s.counters.push_back(r.counters);
  }
  const auto slots = static_cast<double>(measured);
  const auto delivered = static_cast<double>(total.delivered);
  const MeanSe t = batch_estimate(thr, delivered / slots);
  const MeanSe d = batch_estimate(delay, delivered > 0 ? total.delay / delivered : 0.0);
  const MeanSe dh = batch_estimate(delay_half, delivered > 0 ? total.delay_half / delivered : 0.0);
  const MeanSe q = batch_estimate(qd, total.qd / slots);
  s.throughput = t.mean;
  s.throughput_se = t.se;
  s.mean_delay = d.mean;
  s.mean_delay_se = d.se;
  s.mean_delay_half_slot = dh.mean;
  s.mean_delay_half_slot_se = dh.se;
  s.mean_qd = q.mean;
  s.mean_qd_se = q.se;
  s.p_active = static_cast<double>(active) / slots;
  s.p_block = offered > 0 ? static_cast<double>(blocked) / static_cast<double>(offered) : 0.0;
  s.alpha_bar_emp = static_cast<double>(dd) / slots;
  s.delivered = total.delivered;
  return s;
}

std::vector<SimStats> run_policy_comparison(const SystemParams& params, const std::vector<Policy>& policies,
                                            const SimConfig& config, bool common_random_numbers) {
  if (policies.empty()) throw InvalidParams("policy list is empty");
  std::vector<SimStats> out;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    SimConfig c = config;
    if (!common_random_numbers) c.seed = splitmix64(config.seed + 0x632be59bd9b4e019ULL * (i + 1));
    out.push_back(run(params, policies[i], c));
  }
  return out;
}

}  // namespace ehrelay
