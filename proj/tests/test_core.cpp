#include <sstream>

#include "doctest.h"
#include "privauction/errors.hpp"
#include "privauction/market.hpp"
#include "privauction/oracles.hpp"
#include "privauction/rng.hpp"
#include "test_util.hpp"

using namespace privauction;

TEST_CASE("social welfare of the empty allocation is 0") {
  Market market(3, 2, 1, {{{0.5, 0.2}, {0.1, 0.9}, {0.3, 0.3}}});
  std::vector<Assignment> mu(3, std::monostate{});
  CHECK(social_welfare(market, mu) == doctest::Approx(0.0));
}

TEST_CASE("single assigned bidder contributes its value") {
  Market market(1, 1, 1, {{{0.7}}});
  std::vector<Assignment> mu{0};
  CHECK(social_welfare(market, mu) == doctest::Approx(0.7));
}

TEST_CASE("hand-summed welfare agrees with the brute-force enumerator") {
  Market market(3, 2, 1, {{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}});
  std::vector<Assignment> mu{0, 1, std::monostate{}};
  CHECK(social_welfare(market, mu) == doctest::Approx(2.0));
  CHECK(testutil::brute_force_matching(market) == doctest::Approx(2.0));
}

TEST_CASE("infeasible assignments are rejected") {
  Market market(2, 1, 1, {{{0.5}, {0.5}}});
  std::vector<Assignment> mu{0, 0};  // two bidders on a unit-supply type
  CHECK_THROWS_AS(check_feasible(market, mu), InstanceError);
  CHECK_THROWS_AS(social_welfare(market, mu), InstanceError);
}

TEST_CASE("social welfare is permutation-equivariant in bidder order") {
  Market a(3, 2, 2, {{{0.2, 0.9}, {0.7, 0.1}, {0.5, 0.5}}});
  Market b(3, 2, 2, {{{0.5, 0.5}, {0.2, 0.9}, {0.7, 0.1}}});
  std::vector<Assignment> mu_a{1, 0, 0};
  std::vector<Assignment> mu_b{0, 1, 0};
  CHECK(social_welfare(a, mu_a) == doctest::Approx(social_welfare(b, mu_b)));
}

TEST_CASE("unit-demand bundle oracle takes the max over present types") {
  UnitDemandValuation v{{{0.3, 0.9}}};
  BundleValuationOracle oracle = unit_demand_as_bundle_oracle(v);
  Bundle only1(2);
  only1.counts[1] = 1;
  CHECK(oracle.value(0, only1) == doctest::Approx(0.9));
  Bundle both(2);
  both.counts[0] = 1;
  both.counts[1] = 1;
  CHECK(oracle.value(0, both) == doctest::Approx(0.9));
  CHECK(oracle.value(0, Bundle(2)) == doctest::Approx(0.0));
}

TEST_CASE("oracle contract rejects values outside [0,1]") {
  BundleValuationOracle bad([](int, const Bundle& b) {
    return b.empty() ? 0.0 : 1.5;
  }, 2);
  Bundle one(1);
  one.counts[0] = 1;
  CHECK_THROWS_AS(bad.value(0, one), InstanceError);
}

TEST_CASE("unit-demand oracles pass the GS check on small markets") {
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(derive_seed(11, "gs-unit-demand", trial));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int k = 2 + static_cast<int>(rng() % 2);  // 2..3
    UnitDemandValuation v;
    v.v.assign(1, std::vector<double>(k, 0.0));
    for (double& x : v.v[0]) x = unif(rng);
    BundleValuationOracle oracle = unit_demand_as_bundle_oracle(v);
    GsCheckResult result = check_gross_substitutes(oracle, 0, k, 2, 2, 0.25);
    CHECK(result.passes);
  }
}

TEST_CASE("bundle enumeration is lexicographic and respects the caps") {
  std::vector<Bundle> bundles = enumerate_bundles({2, 2}, 2);
  REQUIRE(bundles.size() == 6);
  CHECK(bundles[0].counts == std::vector<int>{0, 0});
  for (const Bundle& b : bundles) {
    CHECK(b.size() <= 2);
    CHECK(b.counts[0] <= 2);
    CHECK(b.counts[1] <= 2);
  }
}

TEST_CASE("bundle subset test is componentwise") {
  Bundle a(2), b(2);
  a.counts = {1, 0};
  b.counts = {1, 1};
  CHECK(a.subset_of(b));
  CHECK_FALSE(b.subset_of(a));
}

TEST_CASE("market JSON round-trips") {
  Market market(2, 2, 3, {{{0.25, 1.0}, {0.0, 0.125}}});
  Market back = parse_market_json(market_to_json(market));
  CHECK(back.bidders() == 2);
  CHECK(back.types() == 2);
  CHECK(back.supply(0) == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(back.value(i, j) == doctest::Approx(market.value(i, j)));
}

TEST_CASE("non-uniform supply: min supply feeds the parameter formulas") {
  Market market(2, 3, std::vector<int>{4, 2, 5});
  CHECK(market.min_supply() == 2);
  CHECK(market.market_size() == 11);
}

TEST_CASE("valuations outside [0,1] are rejected at construction") {
  UnitDemandValuation v{{{1.2}}};
  CHECK_THROWS_AS(Market(1, 1, 1, v), InstanceError);
}

TEST_CASE("bundle-oracle instance files load with unlisted bundles worth 0") {
  std::istringstream in(R"({
    "n": 1, "k": 2, "s": 1,
    "bundles": [{"bidder": 0, "counts": [1, 0], "value": 0.5}]
  })");
  BundleInstance inst = load_bundle_instance_json(in, 2);
  Bundle listed(2), unlisted(2);
  listed.counts = {1, 0};
  unlisted.counts = {0, 1};
  CHECK(inst.oracle.value(0, listed) == doctest::Approx(0.5));
  CHECK(inst.oracle.value(0, unlisted) == doctest::Approx(0.0));
}
