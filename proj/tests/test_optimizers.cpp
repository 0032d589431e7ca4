#include <doctest.h>

#include <random>

#include "ehrelay/experiments.hpp"
#include "ehrelay/finite_chain.hpp"
#include "ehrelay/golden_section.hpp"
#include "ehrelay/optimizers.hpp"
#include "oracles.hpp"

using namespace ehrelay;

TEST_CASE("golden section on a parabola") {
  int calls = 0;
  const auto gs = golden_section(
      [&](double x) {
        ++calls;
        return (x - 0.3) * (x - 0.3);
      },
      0.0, 1.0, 1e-6);
  CHECK(gs.midpoint() == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(gs.evaluations == calls);
  CHECK((gs.hi - gs.lo) / gs.hi < 1e-6);
}

TEST_CASE("golden section keeps the minimizer at an endpoint") {
  const auto down = golden_section([](double x) { return -x; }, 0.0, 1.0, 1e-3);
  CHECK(down.hi == 1.0);
  const auto up = golden_section([](double x) { return x; }, 0.0, 1.0, 1e-3);
  CHECK(up.lo == 0.0);
}

TEST_CASE("alpha^T closed form") {
  CHECK(alpha_t(typical_params()) == doctest::Approx(2.25 / 9.25).epsilon(1e-15));
  SystemParams p = typical_params();
  p.p_det_s = 1.0 - 1e-12;
  CHECK(alpha_t(p) == doctest::Approx(1.0).epsilon(1e-9));
  p = typical_params();
  p.energy = EnergyDistribution({1.0, 0.0});
  CHECK(alpha_t(p) == 0.0);
}

TEST_CASE("t_N") {
  SystemParams p = typical_params();
  p.p_det_r = 1.0;
  CHECK(compute_tn(p) == 1.0);

  testing::Gen g(12);
  for (int draw = 0; draw < 50; ++draw) {
    const SystemParams q = testing::random_params(g);
    REQUIRE(compute_tn(q) >= 1.0 / q.p_det_r - 1e-12);
  }
}

TEST_CASE("t_N agrees with a Monte Carlo of the relay alone") {
  const SystemParams p = typical_params();
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::discrete_distribution<int> gamma(p.energy.probs().begin(), p.energy.probs().end());
  const int reps = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    int qe = p.n_cap;
    long slots = 1;
    // Arrival slot: R decoded, so no harvest; it transmits if it can.
    while (true) {
      if (qe >= p.k_cost) {
        qe -= p.k_cost;
        if (u(rng) < p.p_det_r) break;
      }
      ++slots;
      qe = std::min(qe + gamma(rng), p.n_cap);
    }
    sum += static_cast<double>(slots);
    sum_sq += static_cast<double>(slots) * static_cast<double>(slots);
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - compute_tn(p)) < 3 * se);
}

TEST_CASE("non-cooperation check") {
  SystemParams p = typical_params();
  CHECK_FALSE(noncoop_check(p));
  p.p_det_r = 0.2;
  CHECK(noncoop_check(p));
  p.p_det_s = 0.9;
  CHECK(noncoop_check(p));
}

TEST_CASE("non-cooperation branch gives 1/p_S exactly from both optimizers") {
  SystemParams p = typical_params();
  p.p_det_r = 0.2;
  const auto s = optimize_static(p);
  const auto d = optimize_dynamic(p);
  CHECK(s.objective == 1.0 / p.p_det_s);
  CHECK(d.objective == 1.0 / p.p_det_s);
  CHECK_FALSE(s.cooperation);
  CHECK_FALSE(d.cooperation);
  CHECK(s.best_policy.as_static().alpha == 0.0);
}

TEST_CASE("typical params: interior static optimum below the non-cooperation delay") {
  const SystemParams p = typical_params();
  const auto r = optimize_static(p);
  const double a = r.best_policy.as_static().alpha;
  CHECK(r.cooperation);
  CHECK(a > 0.0);
  CHECK(a < alpha_t(p));
  CHECK(r.objective < 1.0 / 0.3);
  CHECK_FALSE(r.search_trace.empty());
}

TEST_CASE("static optimum against a 200-point grid scan") {
  const SystemParams p = typical_params();
  const double at = alpha_t(p);
  double best = 1.0 / p.p_det_s;
  for (int i = 0; i < 200; ++i) {
    const double a = at * i / 200.0;
    best = std::min(best, static_delay(p, a, DelayConvention::slot_start));
  }
  const double eps = 0.01;
  const auto r = optimize_static(p, eps);
  CHECK(r.objective <= best + eps * best);
}

TEST_CASE("optimal thresholds at p_S=0.3, N=45, K=15, b_max=7") {
  const auto low = optimize_dynamic(table4_params(0.45));
  CHECK(low.best_policy.as_threshold().e_th == 45);
  CHECK(low.objective == doctest::Approx(3.1912).epsilon(0.01));
  const auto high = optimize_dynamic(table4_params(0.9), 0.01, DelayConvention::half_slot, 4);
  CHECK(high.best_policy.as_threshold().e_th == 39);
  CHECK(high.objective == doctest::Approx(2.3825).epsilon(0.01));
  const auto serial = optimize_dynamic(table4_params(0.9));
  CHECK(serial.objective == high.objective);
  CHECK(serial.evaluations == high.evaluations);
}

TEST_CASE("b_max = 1: delay optimum decodes only at (0, N) and hits alpha^T") {
  testing::Gen g(77);
  int checked = 0;
  for (int draw = 0; draw < 40 && checked < 8; ++draw) {
    SystemParams p = testing::random_params(g);
    const double g0 = g.uniform(0.1, 0.9);
    p.energy = EnergyDistribution({g0, 1.0 - g0});
    if (noncoop_check(p)) continue;
    ++checked;
    const auto r = optimize_dynamic(p);
    REQUIRE(r.best_policy.is_threshold());
    CHECK(r.best_policy.as_threshold().e_th == p.n_cap);
    CHECK(r.best_policy.as_threshold().beta == 1.0);
    CHECK(std::abs(evaluate_dynamic(p, r.best_policy).alpha_bar - alpha_t(p)) < 1e-9);
  }
  CHECK(checked > 0);
}

TEST_CASE("dynamic dominates static under either delay convention") {
  testing::Gen g(555);
  for (int draw = 0; draw < 10; ++draw) {
    const SystemParams p = testing::random_params(g, 6, 8);
    for (DelayConvention c : {DelayConvention::slot_start, DelayConvention::half_slot}) {
      const auto s = optimize_static(p, 0.01, c);
      const auto d = optimize_dynamic(p, 0.01, c);
      REQUIRE(d.objective <= s.objective + 1e-9);
    }
  }
}

TEST_CASE("throughput-optimal dynamic policy") {
  const SystemParams p = typical_params();
  const Policy pol = throughput_optimal_dynamic(p);
  CHECK(pol.as_threshold().e_th == 96);
  const auto s = evaluate_dynamic(p, pol);
  CHECK(std::abs(s.alpha_bar - alpha_t(p)) < 1e-9);
  CHECK(s.p_block < 1e-12);
  CHECK_THROWS_AS(throughput_optimal_dynamic(p, p.n_cap), InvalidThreshold);
  CHECK_NOTHROW(throughput_optimal_dynamic(p, 10));
}

TEST_CASE("b_max = 1: every threshold gives the same throughput") {
  SystemParams p = typical_params();
  p.energy = EnergyDistribution::uniform(1);
  const double reference = evaluate_dynamic(p, throughput_optimal_dynamic(p)).throughput;
  for (int e_th = 0; e_th <= p.n_cap; ++e_th) {
    REQUIRE(evaluate_dynamic(p, throughput_optimal_dynamic(p, e_th)).throughput ==
            doctest::Approx(reference).epsilon(1e-12));
  }
}

TEST_CASE("optimizers reject a non-positive tolerance") {
  CHECK_THROWS_AS(optimize_static(typical_params(), 0.0), InvalidParams);
  CHECK_THROWS_AS(optimize_dynamic(typical_params(), -1.0), InvalidParams);
}
