#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "privauction/market.hpp"
#include "privauction/pmatch.hpp"

namespace privauction {

struct PAllocParams {
  double alpha = 0.1;
  double rho = 0.1;
  double epsilon = 1.0;
  double gamma = 0.1;
  AuctionOverrides overrides;
  bool noise_off = false;
};

// T = ceil(10/(alpha*rho)); E carries the "+1" of the bundle-auction error
// bound before rounding up; m = 2E + 1.
DerivedAuctionParams derive_palloc_params(const PAllocParams& params, int n, int k);

// One copy held by a bidder: its type, the counter reading saved at
// acquisition, and the price paid then. Copies of the same type acquired at
// different times are outbid independently.
struct HeldCopy {
  int type;
  double saved_count;
  double acquisition_price;
};

struct BundleState {
  std::vector<HeldCopy> copies;

  Bundle bundle(int k) const;
  double original_cost() const;  // p_0
  int size() const { return static_cast<int>(copies.size()); }
};

// Exhaustive effective-price demand: scores every strict superset of the held
// bundle (up to the oracle's size cap) with held copies at original cost and
// new copies at current prices. Returns one new type from the best superset
// (lowest type index) when that superset beats keeping the bundle, else
// nullopt.
std::optional<int> demand_step(const BundleValuationOracle& oracle, int bidder,
                               const BundleState& state, const PriceVector& prices);

struct PAllocResult {
  Outcome outcome;
  Billboard billboard;
  DerivedAuctionParams derived;
  AuctionDiagnostics diagnostics;
};

// Private ascending-auction allocation for gross-substitutes valuations:
// per round each bidder drops outbid copies, bids on one new demanded good,
// and reports whether it wants to keep bidding; prices step by alpha at each
// new multiple of the effective supply. Requires min supply > m and market
// size d >= n.
PAllocResult palloc_run(const Market& market, const BundleValuationOracle& oracle,
                        const PAllocParams& params, std::uint64_t seed);

}  // namespace privauction
