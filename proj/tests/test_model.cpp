#include <doctest.h>

#include "ehrelay/model.hpp"
#include "oracles.hpp"

using namespace ehrelay;

TEST_CASE("typical parameters validate") { CHECK_NOTHROW(validate(typical_params())); }

TEST_CASE("validate rejects N < 2K") {
  SystemParams p = typical_params();
  p.n_cap = 15;
  CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("N < 2K"), InvalidParams);
}

TEST_CASE("validate rejects b_max > K") {
  SystemParams p = typical_params();
  p.energy = EnergyDistribution::uniform(11);
  CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("b_max > K"), InvalidParams);
}

TEST_CASE("validate rejects degenerate detection probabilities") {
  SystemParams p = typical_params();
  p.p_det_s = 1.0;
  CHECK_THROWS_AS(validate(p), InvalidParams);
  p = typical_params();
  p.p_det_r = 0.0;
  CHECK_THROWS_AS(validate(p), InvalidParams);
  p = typical_params();
  p.k_cost = 0;
  CHECK_THROWS_AS(validate(p), InvalidParams);
}

TEST_CASE("energy distribution rejects non-probability vectors") {
  CHECK_THROWS_AS(EnergyDistribution({0.5, 0.6}), InvalidParams);
  CHECK_THROWS_AS(EnergyDistribution({1.0}), InvalidParams);
  CHECK_THROWS_AS(EnergyDistribution({-0.1, 1.1}), InvalidParams);
  CHECK_THROWS_AS(EnergyDistribution::uniform(0), InvalidParams);
  CHECK_NOTHROW(EnergyDistribution({0.5, 0.5 + 5e-13}));
}

TEST_CASE("mean energy") {
  CHECK(mean_energy(EnergyDistribution::uniform(5)) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mean_energy(EnergyDistribution({0.0, 1.0})) == 1.0);
  CHECK(mean_energy(EnergyDistribution({0.5, 0.25, 0.25})) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("dd_probability examples") {
  CHECK(dd_probability(Policy::static_alpha(0.2), State{3, 17}) == 0.2);
  CHECK(dd_probability(Policy::threshold(95, 0.4), State{0, 95}) == 0.4);
  CHECK(dd_probability(Policy::threshold(95, 0.4), State{1, 100}) == 0.0);
  CHECK(dd_probability(Policy::threshold(95, 0.4), State{0, 96}) == 1.0);
  CHECK(dd_probability(Policy::threshold(95, 0.4), State{0, 94}) == 0.0);
}

TEST_CASE("dd_probability stays in [0, 1] for random policies and states") {
  testing::Gen g(11);
  for (int draw = 0; draw < 200; ++draw) {
    const SystemParams p = testing::random_params(g);
    TabularPolicy tab;
    tab.max_qd = g.integer(0, 3);
    tab.alpha.assign(static_cast<std::size_t>(tab.max_qd) + 1, std::vector<double>(p.phases()));
    for (auto& row : tab.alpha)
      for (auto& a : row) a = g.uniform();
    const Policy policies[] = {Policy::static_alpha(g.uniform()), Policy::threshold(g.integer(0, p.n_cap), g.uniform()),
                               Policy(tab)};
    for (const auto& pol : policies) {
      CHECK_NOTHROW(validate(pol, p));
      for (long qd = 0; qd <= 5; ++qd) {
        for (int qe = 0; qe <= p.n_cap; ++qe) {
          const double a = dd_probability(pol, State{qd, qe});
          REQUIRE(a >= 0.0);
          REQUIRE(a <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("at-least threshold t equals Threshold{t, 1}; strict threshold t equals Threshold{t + 1, 1} and Threshold{t, 0}") {
  const SystemParams p = typical_params();
  for (int t = 0; t < p.n_cap; ++t) {
    const Policy at_least = Policy::at_least(t);
    const Policy strict_a = Policy::threshold(t + 1, 1.0);
    const Policy strict_b = Policy::threshold(t, 0.0);
    for (long qd = 0; qd <= 1; ++qd) {
      for (int qe = 0; qe <= p.n_cap; ++qe) {
        const State s{qd, qe};
        const double ge = (qd == 0 && qe >= t) ? 1.0 : 0.0;
        const double gt = (qd == 0 && qe > t) ? 1.0 : 0.0;
        REQUIRE(dd_probability(at_least, s) == ge);
        REQUIRE(dd_probability(strict_a, s) == gt);
        REQUIRE(dd_probability(strict_b, s) == gt);
      }
    }
  }
}

TEST_CASE("tabular policy is zero beyond max_qd") {
  const SystemParams p = typical_params();
  TabularPolicy tab;
  tab.max_qd = 1;
  tab.alpha.assign(2, std::vector<double>(p.phases(), 0.7));
  const Policy pol(tab);
  CHECK(dd_probability(pol, State{1, 50}) == 0.7);
  CHECK(dd_probability(pol, State{2, 50}) == 0.0);
  CHECK(pol.support_qd() == 1);
  CHECK_FALSE(Policy::static_alpha(0.1).support_qd().has_value());
  CHECK(Policy::static_alpha(0.0).support_qd() == 0);
}

TEST_CASE("policy validation") {
  const SystemParams p = typical_params();
  CHECK_THROWS_AS(validate(Policy::static_alpha(1.5), p), InvalidParams);
  CHECK_THROWS_AS(validate(Policy::threshold(101, 1.0), p), InvalidParams);
  CHECK_THROWS_AS(validate(Policy::threshold(50, -0.1), p), InvalidParams);
  TabularPolicy tab;
  tab.max_qd = 1;
  tab.alpha.assign(1, std::vector<double>(p.phases(), 0.0));
  CHECK_THROWS_AS(validate(Policy(tab), p), InvalidParams);
}
