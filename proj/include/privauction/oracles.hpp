#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "privauction/market.hpp"

namespace privauction {

// Measured slack of an outcome against the approximate-equilibrium
// definitions. All fields are recomputed deterministically from
// (market, outcome); "over-demanded" means strictly positive price.
struct EquilibriumReport {
  double measured_alpha = 0.0;  // max regret among satisfied bidders
  int measured_beta = 0;        // max unsold supply among over-demanded types
  double measured_rho = 0.0;    // unsatisfied fraction
  bool feasible = true;
};

// Exact max-weight matching with each type expanded into its supply of
// copies, via successive shortest augmenting paths. Bidders may stay
// unmatched; only welfare-improving assignments are made.
std::pair<Outcome, double> exact_max_matching(const Market& market);

// Exact optimum over feasible bundle partitions with per-bidder size cap b,
// by exhaustive search. Throws GuardError when the search tree exceeds ~1e7
// states.
std::pair<Outcome, double> exact_max_allocation(const Market& market,
                                                const BundleValuationOracle& oracle,
                                                int max_bundle_size);

// Non-private simultaneous ascending auction run to quiescence: exact bid
// counts, no reserved supply, no early halting. Returns the final allocation
// and prices. Throws InstanceError if prices pass 1 + alpha everywhere while
// demand persists.
std::pair<Outcome, PriceVector> kelso_crawford(const Market& market,
                                               const BundleValuationOracle& oracle,
                                               double alpha);

// Unit-demand convenience wrapper over the market's valuation matrix.
std::pair<Outcome, PriceVector> kelso_crawford(const Market& market, double alpha);

// Measures an outcome against the approximate matching-equilibrium
// definition. `alpha` is the run's price increment; a bidder is satisfied
// when their regret at the outcome prices is at most alpha.
EquilibriumReport verify_matching_equilibrium(const Market& market,
                                              const Outcome& outcome,
                                              double alpha);

// Bundle version: regret is measured against exhaustive search over bundles
// of size <= b; the satisfaction threshold is alpha * |g(i)|; rho is reported
// as a fraction of the market size d.
EquilibriumReport verify_allocation_equilibrium(const Market& market,
                                                const BundleValuationOracle& oracle,
                                                const Outcome& outcome,
                                                int max_bundle_size, double alpha);

struct GsWitness {
  PriceVector low_prices;
  PriceVector high_prices;
  Bundle demanded_at_low;
};

struct GsCheckResult {
  bool passes = true;
  std::optional<GsWitness> witness;
};

// Brute-force gross-substitutes check over a finite price grid
// {0, step, ..., 1}^k and bundles with counts <= s, size <= b. A returned
// witness is a real violation; passing is only grid-complete.
GsCheckResult check_gross_substitutes(const BundleValuationOracle& oracle,
                                      int bidder, int k, int s, int max_bundle_size,
                                      double price_grid_step);

}  // namespace privauction
