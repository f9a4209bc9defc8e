#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "privauction/market.hpp"

namespace privauction {

struct AuctionOverrides {
  std::optional<long> rounds;       // T
  std::optional<double> error_bound;  // E
  std::optional<int> reserve;       // m
};

struct PMatchParams {
  double alpha = 0.1;    // price increment / accuracy
  double rho = 0.1;      // target unsatisfied fraction
  double epsilon = 1.0;  // total joint-DP budget
  double gamma = 0.1;    // failure probability for the error bound E
  AuctionOverrides overrides;
  bool noise_off = false;
};

// Values fixed at auction start. T = ceil(8/(alpha*rho)), eps' = eps/(2T),
// E = (2*sqrt(2)/eps') * (log2(nT))^(5/2) * ln(4k/gamma) rounded up to an
// integer, m = 2E + 1.
struct DerivedAuctionParams {
  long rounds;             // T
  double counter_epsilon;  // eps'
  double error_bound;      // E (integral)
  int reserve;             // m
};

DerivedAuctionParams derive_pmatch_params(const PMatchParams& params, int n, int k);

// Everything the auction publishes: one record per (round, bidder) step with
// the k good-counter releases after that bidder's bid and the halt-counter
// release after that bidder's halt report. Prices are reconstructible from
// the releases alone via the price-update rule; no bidder data appears.
struct BillboardStep {
  std::vector<double> good_releases;
  double halt_release = 0.0;
};

struct Billboard {
  int bidders = 0;
  int types = 0;
  double alpha = 0.0;
  int effective_supply = 0;  // s - m, needed to replay price updates
  // false: price steps once when a release reaches the next threshold
  // (matching auction); true: price steps at every multiple of the effective
  // supply crossed (bundle auction).
  bool multiples_price_rule = false;
  std::vector<std::vector<BillboardStep>> rounds;
  long halted_at = 0;  // rounds actually executed
  bool halted_early = false;
};

struct AuctionDiagnostics {
  std::vector<int> bids_per_bidder;
  double max_counter_error = 0.0;  // realized max |release - exact count|
  bool threshold_clamped = false;  // halting threshold was raised to 1
};

struct AuctionResult {
  Outcome outcome;
  Billboard billboard;
  DerivedAuctionParams derived;
  AuctionDiagnostics diagnostics;
};

// Simulates the private ascending-auction matching: T proposal rounds over
// bidders in index order, bids fed to one noisy counter per good type plus a
// halt counter counting newly outbid bidders. Requires min supply > m.
AuctionResult pmatch_run(const Market& market, const PMatchParams& params,
                         std::uint64_t seed);

// Replays bidder `bidder_index`'s decisions from the published billboard and
// their own valuation row alone; equals the generating run's assignment.
// nullopt means unmatched. Throws GuardError on a malformed billboard.
std::optional<int> derive_allocation(const std::vector<double>& valuation_row,
                                     int bidder_index, const Billboard& billboard);

struct MultiplicativeParams {
  double lambda_min = 1.0;    // floor on nonzero valuations
  double opt_estimate = 0.0;  // externally supplied OPT
  double alpha = 0.1;
  double epsilon = 1.0;
  double gamma = 0.1;
  AuctionOverrides overrides;
  bool noise_off = false;
};

// PMatch with the bid-counting halting rule: T = ceil(24/alpha^2) rounds,
// halting once bids per round drop below alpha*opt_estimate/(2*lambda) - 2E.
AuctionResult pmatch_run_multiplicative(const Market& market,
                                        const MultiplicativeParams& params,
                                        std::uint64_t seed);

// Convenience OPT estimate: exact max matching plus Laplace(1/epsilon_opt)
// noise (one bidder's valuation row moves OPT by at most 1).
double noisy_opt_estimate(const Market& market, double epsilon_opt,
                          std::uint64_t seed);

}  // namespace privauction
