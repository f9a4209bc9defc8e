#include <cmath>

#include "doctest.h"
#include "privauction/attacks.hpp"
#include "privauction/errors.hpp"
#include "privauction/oracles.hpp"
#include "privauction/rng.hpp"

using namespace privauction;

TEST_CASE("reconstruction bound spot values") {
  CHECK(reconstruction_bound(0.0, 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(reconstruction_bound(50.0, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  // Independent re-evaluation of the closed form.
  double eps = 0.1, delta = 0.1, beta = 0.01;
  double expected =
      1.0 - (std::exp(eps) + delta) / ((1.0 + std::exp(eps)) * (1.0 - beta));
  CHECK(reconstruction_bound(eps, delta, beta) == doctest::Approx(expected));
}

TEST_CASE("reconstruction bound rejects beta >= 1") {
  CHECK_THROWS_AS(reconstruction_bound(1.0, 0.0, 1.0), ConfigError);
}

TEST_CASE("reconstruction bound is monotone decreasing in each argument") {
  const double eps_grid[] = {0.0, 0.5, 1.0, 2.0};
  const double delta_grid[] = {0.0, 0.1};
  const double beta_grid[] = {0.0, 0.1};
  for (double e : eps_grid)
    for (double d : delta_grid)
      for (double b : beta_grid) {
        double base = reconstruction_bound(e, d, b);
        CHECK(reconstruction_bound(e + 0.25, d, b) <= base + 1e-12);
        CHECK(reconstruction_bound(e, d + 0.05, b) <= base + 1e-12);
        CHECK(reconstruction_bound(e, d, b + 0.05) <= base + 1e-12);
      }
}

TEST_CASE("allocation gadget wires each bit into one bidder") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kAllocation;
  spec.database = {0, 1, 1, 0};
  GadgetMarket gm = build_gadget_market(spec, 1);
  CHECK(gm.market.bidders() == 4);
  CHECK(gm.market.types() == 2);
  CHECK(gm.market.supply(0) == 4);  // "infinite" supply realized as s = n
  CHECK(gm.market.value(1, 1) == doctest::Approx(1.0));
  CHECK(gm.market.value(1, 0) == doctest::Approx(0.0));
  CHECK(gm.market.value(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("joint gadget spy valuation is 1/(4s)") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kJoint;
  spec.database = {1};
  spec.supply = 4;
  CHECK(spec.eta() == doctest::Approx(0.0625));
  GadgetMarket gm = build_gadget_market(spec, 2);
  CHECK(gm.market.bidders() == 5);  // one real bidder + s spies
  CHECK(gm.market.types() == 2);
  REQUIRE(gm.spy_bidders[0].size() == 4);
  int pref = gm.spy_preferred_good[0];
  for (int spy : gm.spy_bidders[0])
    CHECK(gm.market.value(spy, gm.gadget_good(0, pref)) == doctest::Approx(0.0625));
}

TEST_CASE("prices gadget dimensions scale with the database") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kPrices;
  spec.database = {1, 0, 1};
  GadgetMarket gm = build_gadget_market(spec, 3);
  CHECK(gm.market.bidders() == 6);
  CHECK(gm.market.types() == 6);
  CHECK(gm.market.supply(0) == 1);
}

TEST_CASE("price attack thresholds at one half") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kPrices;
  spec.database = {1};
  GadgetMarket gm = build_gadget_market(spec, 4);
  PriceVector prices;
  prices.p = {0.6, 0.1};
  CHECK(attack_prices(prices, gm) == std::vector<int>{0});
  prices.p = {0.1, 0.6};
  CHECK(attack_prices(prices, gm) == std::vector<int>{1});
  prices.p = {0.0, 0.0};
  CHECK(attack_prices(prices, gm) == std::vector<int>{0});
}

TEST_CASE("exact auction prices on the gadget recover the database") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kPrices;
  spec.database = {1, 0, 1, 1, 0};
  GadgetMarket gm = build_gadget_market(spec, 5);
  // Both gadget bidders contest the unit-supply good named by the bit, so the
  // ascending auction drives its price past 1 - alpha > 1/2.
  auto [outcome, prices] = kelso_crawford(gm.market, 0.1);
  CHECK(attack_prices(prices, gm) == spec.database);
}

TEST_CASE("allocation attack reads the optimal matching exactly") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kAllocation;
  spec.database = {0, 1, 0, 0, 1, 1, 1, 0};
  GadgetMarket gm = build_gadget_market(spec, 6);
  auto [outcome, opt] = exact_max_matching(gm.market);
  CHECK(attack_allocation(outcome, gm, 6) == spec.database);
}

TEST_CASE("allocation attack on an all-unmatched outcome guesses half right") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kAllocation;
  spec.database.assign(2000, 1);
  GadgetMarket gm = build_gadget_market(spec, 7);
  Outcome outcome;
  outcome.prices.p = {0.0, 0.0};
  outcome.assignment.assign(2000, std::monostate{});
  std::vector<int> guess = attack_allocation(outcome, gm, 7);
  int correct = 2000 - hamming_distance(guess, spec.database);
  CHECK(correct > 850);
  CHECK(correct < 1150);
}

TEST_CASE("allocation attack error is bounded by the welfare gap plus coins") {
  // With 0/1 valuations each mis-assigned bidder costs exactly 1 welfare, so
  // hamming error <= welfare gap + number of unmatched bidders.
  GadgetSpec spec;
  spec.variant = GadgetVariant::kAllocation;
  Rng rng(99);
  spec.database.resize(60);
  for (int& b : spec.database) b = static_cast<int>(rng() & 1ULL);
  GadgetMarket gm = build_gadget_market(spec, 8);
  auto [opt_outcome, opt] = exact_max_matching(gm.market);
  // Corrupt: unmatch 10 bidders, flip 5.
  Outcome corrupted = opt_outcome;
  for (int i = 0; i < 10; ++i) corrupted.assignment[i] = std::monostate{};
  for (int i = 10; i < 15; ++i)
    corrupted.assignment[i] = 1 - spec.database[i];
  corrupted.welfare = opt - 15.0;
  std::vector<int> guess = attack_allocation(corrupted, gm, 9);
  int unmatched = 10;
  double gap = opt - corrupted.welfare;
  CHECK(hamming_distance(guess, spec.database) <= gap + unmatched);
}

TEST_CASE("joint attack case analysis") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kJoint;
  spec.database = {1, 0};
  spec.supply = 2;
  GadgetMarket gm = build_gadget_market(spec, 10);
  std::vector<Assignment> assignment(gm.market.bidders(), std::monostate{});
  // Gadget 0: all spies on good 0_0 -> bit 1. Gadget 1: all spies on 1_1 ->
  // bit 0.
  for (int spy : gm.spy_bidders[0]) assignment[spy] = gm.gadget_good(0, 0);
  for (int spy : gm.spy_bidders[1]) assignment[spy] = gm.gadget_good(1, 1);
  CHECK(attack_joint(assignment, gm, 11) == std::vector<int>{1, 0});
}

TEST_CASE("joint attack never reads the real bidders' assignments") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kJoint;
  spec.database = {1};
  spec.supply = 2;
  GadgetMarket gm = build_gadget_market(spec, 12);
  std::vector<Assignment> a(gm.market.bidders(), std::monostate{});
  for (int spy : gm.spy_bidders[0]) a[spy] = gm.gadget_good(0, 0);
  std::vector<Assignment> b = a;
  b[gm.real_bidder[0]] = gm.gadget_good(0, 1);  // only the real bidder differs
  CHECK(attack_joint(a, gm, 13) == attack_joint(b, gm, 13));
}

TEST_CASE("exact matching leaks the whole database") {
  AttackExperimentConfig config;
  config.variant = GadgetVariant::kAllocation;
  config.mechanism = AttackMechanism::kExactMatching;
  config.bits = 64;
  std::vector<AttackTrial> rows = run_attack_experiment(config, 5, 14);
  REQUIRE(rows.size() == 5);
  for (const AttackTrial& r : rows) {
    CHECK(r.welfare_gap == doctest::Approx(0.0));
    CHECK(r.reconstructed_fraction == doctest::Approx(1.0));
  }
}

TEST_CASE("attack experiments are deterministic in the seed") {
  AttackExperimentConfig config;
  config.variant = GadgetVariant::kJoint;
  config.mechanism = AttackMechanism::kKelsoCrawford;
  config.bits = 8;
  config.supply = 2;
  config.alpha = 0.25;
  std::vector<AttackTrial> a = run_attack_experiment(config, 3, 15);
  std::vector<AttackTrial> b = run_attack_experiment(config, 3, 15);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].welfare_gap == b[i].welfare_gap);
    CHECK(a[i].reconstructed_fraction == b[i].reconstructed_fraction);
  }
}

TEST_CASE("database entries must be bits") {
  GadgetSpec spec;
  spec.variant = GadgetVariant::kAllocation;
  spec.database = {0, 2};
  CHECK_THROWS_AS(build_gadget_market(spec, 1), InstanceError);
}
