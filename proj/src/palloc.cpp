#include "privauction/palloc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "auction_detail.hpp"
#include "privauction/counter.hpp"
#include "privauction/errors.hpp"
#include "privauction/rng.hpp"

namespace privauction {

Bundle BundleState::bundle(int k) const {
  Bundle b(k);
  for (const HeldCopy& c : copies) b.counts[c.type] += 1;
  return b;
}

double BundleState::original_cost() const {
  double sum = 0.0;
  for (const HeldCopy& c : copies) sum += c.acquisition_price;
  return sum;
}

std::optional<int> demand_step(const BundleValuationOracle& oracle, int bidder,
                               const BundleState& state, const PriceVector& prices) {
  const int k = prices.types();
  const int cap = oracle.max_bundle_size();
  Bundle held = state.bundle(k);
  int held_size = held.size();
  if (held_size >= cap) return std::nullopt;

  // Score supersets as v(held + extra) - p(extra); the original cost p_0 of
  // the held bundle cancels from both sides of the comparison.
  double keep_score = oracle.value(bidder, held);
  std::vector<int> extra_cap(k, cap - held_size);
  std::vector<Bundle> extras = enumerate_bundles(extra_cap, cap - held_size);

  double best_score = keep_score;
  std::optional<Bundle> best_extra;
  for (const Bundle& extra : extras) {
    if (extra.empty()) continue;
    Bundle candidate = held;
    double extra_price = 0.0;
    for (int j = 0; j < k; ++j) {
      candidate.counts[j] += extra.counts[j];
      extra_price += prices.p[j] * extra.counts[j];
    }
    double score = oracle.value(bidder, candidate) - extra_price;
    if (score > best_score) {
      best_score = score;
      best_extra = extra;
    }
  }
  if (!best_extra) return std::nullopt;
  for (int j = 0; j < k; ++j)
    if (best_extra->counts[j] > 0) return j;
  return std::nullopt;  // unreachable
}

DerivedAuctionParams derive_palloc_params(const PAllocParams& params, int n,
                                          int k) {
  detail::validate_common(params.alpha, params.epsilon, params.gamma);
  if (!(params.rho > 0.0 && params.rho < 1.0))
    throw ConfigError("rho must be in (0,1)");
  long default_rounds =
      static_cast<long>(std::ceil(10.0 / (params.alpha * params.rho)));
  return detail::resolve_params(default_rounds, params.epsilon, n, k,
                                params.gamma, params.overrides,
                                /*extra_error=*/1.0);
}

PAllocResult palloc_run(const Market& market, const BundleValuationOracle& oracle,
                        const PAllocParams& params, std::uint64_t seed) {
  const int n = market.bidders();
  const int k = market.types();
  const int s = market.min_supply();
  const int d = market.market_size();
  DerivedAuctionParams derived = derive_palloc_params(params, n, k);
  const int m = derived.reserve;
  if (s <= m)
    throw ConfigError("supply too small: need min supply s > m (s=" +
                      std::to_string(s) + ", m=" + std::to_string(m) + ")");
  if (d < n)
    throw ConfigError("market size d = " + std::to_string(d) +
                      " must be at least the bidder count n = " +
                      std::to_string(n));
  const int s_eff = s - m;
  const long T = derived.rounds;
  const long horizon = static_cast<long>(n) * T;

  CounterConfig counter_cfg;
  counter_cfg.epsilon = derived.counter_epsilon;
  counter_cfg.horizon = horizon;
  counter_cfg.noise_mode = params.noise_off ? NoiseMode::kOff : NoiseMode::kLaplace;
  counter_cfg.monotonize = true;

  std::vector<BinaryCounter> good_counters;
  good_counters.reserve(k);
  for (int j = 0; j < k; ++j) {
    CounterConfig c = counter_cfg;
    c.rng_seed = derive_seed(seed, "good-counter", j);
    good_counters.emplace_back(c);
  }
  CounterConfig halt_cfg = counter_cfg;
  halt_cfg.rng_seed = derive_seed(seed, "halt-counter");
  BinaryCounter halt_counter(halt_cfg);

  std::vector<BundleState> state(n);
  std::vector<int> price_level(k, 0);  // multiples of s_eff crossed so far
  std::vector<double> released(k, 0.0);
  std::vector<int> bids(n, 0);
  double max_err = 0.0;

  Billboard billboard;
  billboard.bidders = n;
  billboard.types = k;
  billboard.alpha = params.alpha;
  billboard.effective_supply = s_eff;
  billboard.multiples_price_rule = true;

  PriceVector prices;
  prices.p.assign(k, 0.0);

  double threshold = params.rho * d - 2.0 * derived.error_bound;
  bool clamped = threshold < 1.0;
  if (clamped) {
    std::clog << "palloc: halting threshold rho*d - 2E = " << threshold
              << " clamped to 1\n";
    threshold = 1.0;
  }

  double prev_halt_release = 0.0;
  bool halted_early = false;
  long round = 0;
  for (; round < T && !halted_early; ++round) {
    std::vector<BillboardStep> steps(n);
    // Propose
    for (int i = 0; i < n; ++i) {
      // Drop copies that have been outbid since acquisition.
      auto& copies = state[i].copies;
      copies.erase(std::remove_if(copies.begin(), copies.end(),
                                  [&](const HeldCopy& c) {
                                    return released[c.type] - c.saved_count >=
                                           static_cast<double>(s_eff);
                                  }),
                   copies.end());

      int bid_on = -1;
      if (auto j = demand_step(oracle, i, state[i], prices)) {
        bid_on = *j;
        // saved_count is back-filled below with the post-bid reading: the
        // copy is outbid once s - m further bids arrive.
        copies.push_back({*j, 0.0, prices.p[*j]});
        ++bids[i];
      }
      steps[i].good_releases.resize(k);
      for (int j = 0; j < k; ++j) {
        released[j] = good_counters[j].feed(j == bid_on ? 1 : 0);
        max_err = std::max(max_err, std::abs(released[j] -
                                             good_counters[j].exact_count()));
        // Price steps once per multiple of s - m newly crossed; noisy counts
        // can jump past several multiples at once.
        int multiples = static_cast<int>(std::floor(released[j] / s_eff));
        if (multiples > price_level[j]) {
          price_level[j] = multiples;
          prices.p[j] = price_level[j] * params.alpha;
        }
        steps[i].good_releases[j] = released[j];
      }
      if (bid_on >= 0) copies.back().saved_count = released[bid_on];
    }
    // CountUnsatisfied: a bidder wants to continue iff demand_step returns a
    // type at the current effective prices.
    double halt_release = prev_halt_release;
    for (int i = 0; i < n; ++i) {
      int bit = demand_step(oracle, i, state[i], prices) ? 1 : 0;
      halt_release = halt_counter.feed(bit);
      max_err = std::max(max_err,
                         std::abs(halt_release - halt_counter.exact_count()));
      steps[i].halt_release = halt_release;
    }
    billboard.rounds.push_back(std::move(steps));
    double increase = halt_release - prev_halt_release;
    prev_halt_release = halt_release;
    if (increase < threshold) halted_early = true;
  }

  billboard.halted_at = round;
  billboard.halted_early = halted_early;

  Outcome outcome;
  outcome.prices = prices;
  outcome.assignment.resize(n);
  double welfare = 0.0;
  for (int i = 0; i < n; ++i) {
    Bundle b = state[i].bundle(k);
    welfare += oracle.value(i, b);
    outcome.assignment[i] = std::move(b);
  }
  outcome.welfare = welfare;

  PAllocResult result;
  result.outcome = std::move(outcome);
  result.billboard = std::move(billboard);
  result.derived = derived;
  result.diagnostics.bids_per_bidder = std::move(bids);
  result.diagnostics.max_counter_error = max_err;
  result.diagnostics.threshold_clamped = clamped;
  return result;
}

}  // namespace privauction
