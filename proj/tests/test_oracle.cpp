#include <doctest.h>

#include <cmath>

#include "cran/association.hpp"
#include "cran/oracle.hpp"
#include "support.hpp"

using namespace cran;
using testing_support::TestRng;

TEST_CASE("fixed association without a fronthaul limit is the wireless optimum") {
  const auto inst = testing_support::deployment(2, 2, 3, 1, 1e15);
  const auto a = AssociationMap::from_sets(3, {{0, 1}, {1, 2}});
  const FixedAssociationResult r = solve_fixed_association(inst.ch, a, inst.net);
  CHECK(r.gamma == r.gamma1);
  CHECK(r.gamma2 > r.gamma1);
  CHECK(r.gamma1 == solve_max_min(inst.ch, a, inst.net.power_cap_w, inst.net.noise_power_w).gamma);
  CHECK(r.beamformers == r.wireless_beamformers);
}

TEST_CASE("fixed association limited by the fronthaul") {
  TestRng rng(2);
  const ChannelState h = testing_support::random_channels(rng, 1, 1, 2, 3.0);
  NetworkConfig net{1, 1, 2, 1.0, {1.0}, {2.0}, 0.1};
  const FixedAssociationResult r =
      solve_fixed_association(h, AssociationMap::full(1, 1), net);
  CHECK(r.gamma == 3.0);
  CHECK(r.gamma1 > 3.0);
  // Minimum power at the cap: gamma sigma^2 / ||h||^2.
  const double p = per_rrh_power(r.beamformers)[0];
  CHECK(p == doctest::Approx(3.0 * 0.1 / h(0, 0).squaredNorm()).epsilon(1e-5));
}

TEST_CASE("fixed-association solutions satisfy every constraint") {
  for (int seed = 0; seed < 5; ++seed) {
    const auto inst = testing_support::deployment(3, 2, 4, 10 + seed, 3e7);
    TestRng rng(seed);
    const auto a = testing_support::random_serving_association(rng, 3, 4);
    const FixedAssociationResult r = solve_fixed_association(inst.ch, a, inst.net);
    CHECK(r.gamma == std::min(r.gamma1, r.gamma2));
    const auto power = per_rrh_power(r.beamformers);
    for (int n = 0; n < 3; ++n) CHECK(power[n] <= (1.0 + 1e-6) * inst.net.power_cap_w[n]);
    for (int k = 0; k < 4; ++k)
      for (int n = 0; n < 3; ++n)
        if (!a.contains(n, k)) CHECK(r.beamformers(k, n).norm() == 0.0);
    for (double g : compute_sinrs(inst.ch, r.beamformers, inst.net.noise_power_w))
      CHECK(g >= r.gamma * (1.0 - 1e-4));
    const std::vector<double> rates(4, achievable_rate(r.gamma, inst.net.bandwidth_hz));
    const auto load = fronthaul_load(a, rates);
    for (int n = 0; n < 3; ++n) CHECK(load[n] <= inst.net.fronthaul_cap_bps[n] * (1.0 + 1e-9));
  }
}

TEST_CASE("oracle on a single link") {
  TestRng rng(3);
  const ChannelState h = testing_support::random_channels(rng, 1, 1, 2);
  NetworkConfig net{1, 1, 2, 1.0, {1.0}, {1e9}, 0.1};
  const OracleResult r = exhaustive_best(h, net);
  CHECK(r.evaluated == 1);
  CHECK(r.association == AssociationMap::full(1, 1));
  CHECK(r.gamma == doctest::Approx(h(0, 0).squaredNorm() / 0.1).epsilon(1e-3));
}

TEST_CASE("oracle without fronthaul limits prefers full cooperation") {
  const auto inst = testing_support::deployment(2, 2, 2, 20, 1e15);
  const OracleResult r = exhaustive_best(inst.ch, inst.net);
  CHECK(r.evaluated == 9);
  const double full = solve_fixed_association(inst.ch, AssociationMap::full(2, 2), inst.net).gamma;
  CHECK(r.gamma >= full);
  CHECK(r.gamma <= full * (1.0 + 1e-3));
}

TEST_CASE("oracle dominates the heuristics") {
  for (int seed = 0; seed < 3; ++seed) {
    const auto inst = testing_support::deployment(2, 2, 3, 30 + seed, 2e7);
    const OracleResult best = exhaustive_best(inst.ch, inst.net, {}, true, 2);
    CHECK(best.evaluated == 27);
    CHECK(best.association.all_served());
    for (const SolveReport& rep :
         {run_algorithm1(inst.ch, inst.net), run_benchmark2(inst.ch, inst.net, {}, &inst.topo),
          run_benchmark3(inst.ch, inst.net, {}, &inst.topo)})
      CHECK(rep.final_gamma <= best.gamma * (1.0 + 1e-3));
  }
}

TEST_CASE("oracle thread count does not change the answer") {
  const auto inst = testing_support::deployment(2, 1, 3, 40, 1e7);
  const OracleResult a = exhaustive_best(inst.ch, inst.net, {}, true, 1);
  const OracleResult b = exhaustive_best(inst.ch, inst.net, {}, true, 3);
  CHECK(a.gamma == b.gamma);
  CHECK(a.association == b.association);
  CHECK(a.evaluated == b.evaluated);
}

TEST_CASE("oracle can include unserved users") {
  const auto inst = testing_support::deployment(2, 1, 2, 50, 1e7);
  const OracleResult r = exhaustive_best(inst.ch, inst.net, {}, false);
  CHECK(r.evaluated == 16);
  CHECK(r.association.all_served());  // leaving someone out scores zero
}

TEST_CASE("oracle refuses large searches") {
  TestRng rng(4);
  const ChannelState h = testing_support::random_channels(rng, 13, 1, 1);
  NetworkConfig net{1, 13, 1, 1.0, {1.0}, {1.0}, 0.1};
  CHECK_THROWS_AS(exhaustive_best(h, net), OracleSizeError);
}
