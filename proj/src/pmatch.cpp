#include "privauction/pmatch.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "auction_detail.hpp"
#include "privauction/counter.hpp"
#include "privauction/errors.hpp"
#include "privauction/oracles.hpp"
#include "privauction/rng.hpp"

namespace privauction {

namespace {

using detail::resolve_params;
using detail::validate_common;

constexpr int kUnset = -1;  // mu(i) = empty
constexpr int kBot = -2;    // mu(i) = bottom

enum class HaltRule { kUnsatisfied, kBids };

struct EngineConfig {
  double alpha;
  double epsilon;
  double gamma;
  bool noise_off;
  HaltRule halt_rule;
  double halt_threshold;  // already includes -2E; clamped by caller
  DerivedAuctionParams derived;
};

AuctionResult run_engine(const Market& market, const EngineConfig& cfg,
                         std::uint64_t seed) {
  const int n = market.bidders();
  const int k = market.types();
  const int s = market.min_supply();
  const int m = cfg.derived.reserve;
  if (s <= m)
    throw ConfigError("supply too small: need min supply s > m (s=" +
                      std::to_string(s) + ", m=" + std::to_string(m) + ")");
  const int s_eff = s - m;
  const long T = cfg.derived.rounds;
  const long horizon = static_cast<long>(n) * T;

  CounterConfig counter_cfg;
  counter_cfg.epsilon = cfg.derived.counter_epsilon;
  counter_cfg.horizon = horizon;
  counter_cfg.noise_mode = cfg.noise_off ? NoiseMode::kOff : NoiseMode::kLaplace;
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

  std::vector<int> mu(n, kUnset);
  std::vector<double> d(n, 0.0);
  std::vector<int> price_level(k, 0);
  std::vector<double> released(k, 0.0);
  std::vector<int> bids(n, 0);
  double max_err = 0.0;

  Billboard billboard;
  billboard.bidders = n;
  billboard.types = k;
  billboard.alpha = cfg.alpha;
  billboard.effective_supply = s_eff;

  auto price = [&](int j) { return price_level[j] * cfg.alpha; };

  double prev_halt_release = 0.0;
  bool halted_early = false;
  long round = 0;
  for (; round < T && !halted_early; ++round) {
    std::vector<BillboardStep> steps(n);
    std::vector<char> bid_this_round(n, 0);
    // Propose
    for (int i = 0; i < n; ++i) {
      int bid_on = -1;
      if (mu[i] == kUnset) {
        int best = 0;
        double best_util = market.value(i, 0) - price(0);
        for (int j = 1; j < k; ++j) {
          double util = market.value(i, j) - price(j);
          if (util > best_util) {
            best_util = util;
            best = j;
          }
        }
        if (best_util <= 0.0) {
          mu[i] = kBot;
        } else {
          mu[i] = best;
          bid_on = best;
          ++bids[i];
          bid_this_round[i] = 1;
        }
      }
      // Bid: one bit to every good counter, then the price-update rule.
      steps[i].good_releases.resize(k);
      for (int j = 0; j < k; ++j) {
        released[j] = good_counters[j].feed(j == bid_on ? 1 : 0);
        max_err = std::max(max_err, std::abs(released[j] -
                                             good_counters[j].exact_count()));
        if (released[j] >=
            static_cast<double>(price_level[j] + 1) * s_eff)
          ++price_level[j];
        steps[i].good_releases[j] = released[j];
      }
      // d_i is the counter reading at the time of the bid, own bid included;
      // the bidder is outbid once s - m further bids arrive.
      if (bid_on >= 0) d[i] = released[bid_on];
    }
    // Halting-rule pass
    double halt_release = prev_halt_release;
    for (int i = 0; i < n; ++i) {
      int bit = 0;
      if (cfg.halt_rule == HaltRule::kUnsatisfied) {
        if (mu[i] >= 0 && released[mu[i]] - d[i] >= static_cast<double>(s_eff)) {
          mu[i] = kUnset;
          bit = 1;
        }
      } else {
        if (mu[i] >= 0 && released[mu[i]] - d[i] >= static_cast<double>(s_eff))
          mu[i] = kUnset;
        bit = bid_this_round[i] ? 1 : 0;
      }
      halt_release = halt_counter.feed(bit);
      max_err = std::max(max_err,
                         std::abs(halt_release - halt_counter.exact_count()));
      steps[i].halt_release = halt_release;
    }
    billboard.rounds.push_back(std::move(steps));
    double increase = halt_release - prev_halt_release;
    prev_halt_release = halt_release;
    if (increase < cfg.halt_threshold) halted_early = true;
  }

  billboard.halted_at = round;
  billboard.halted_early = halted_early;

  Outcome outcome;
  outcome.prices.p.resize(k);
  for (int j = 0; j < k; ++j) outcome.prices.p[j] = price(j);
  outcome.assignment.resize(n);
  for (int i = 0; i < n; ++i) {
    if (mu[i] >= 0)
      outcome.assignment[i] = mu[i];
    else
      outcome.assignment[i] = std::monostate{};
  }
  double welfare = 0.0;
  for (int i = 0; i < n; ++i)
    if (mu[i] >= 0) welfare += market.value(i, mu[i]);
  outcome.welfare = welfare;

  AuctionResult result;
  result.outcome = std::move(outcome);
  result.billboard = std::move(billboard);
  result.derived = cfg.derived;
  result.diagnostics.bids_per_bidder = std::move(bids);
  result.diagnostics.max_counter_error = max_err;
  return result;
}

}  // namespace

DerivedAuctionParams derive_pmatch_params(const PMatchParams& params, int n,
                                          int k) {
  validate_common(params.alpha, params.epsilon, params.gamma);
  if (!(params.rho > 0.0 && params.rho < 1.0))
    throw ConfigError("rho must be in (0,1)");
  long default_rounds =
      static_cast<long>(std::ceil(8.0 / (params.alpha * params.rho)));
  return resolve_params(default_rounds, params.epsilon, n, k, params.gamma,
                 params.overrides, /*extra_error=*/0.0);
}

AuctionResult pmatch_run(const Market& market, const PMatchParams& params,
                         std::uint64_t seed) {
  if (!market.has_valuations())
    throw InstanceError("pmatch requires unit-demand valuations");
  DerivedAuctionParams derived =
      derive_pmatch_params(params, market.bidders(), market.types());

  EngineConfig cfg;
  cfg.alpha = params.alpha;
  cfg.epsilon = params.epsilon;
  cfg.gamma = params.gamma;
  cfg.noise_off = params.noise_off;
  cfg.halt_rule = HaltRule::kUnsatisfied;
  cfg.derived = derived;
  double threshold = params.rho * market.bidders() - 2.0 * derived.error_bound;
  bool clamped = threshold < 1.0;
  if (clamped) {
    std::clog << "pmatch: halting threshold rho*n - 2E = " << threshold
              << " clamped to 1\n";
    threshold = 1.0;
  }
  cfg.halt_threshold = threshold;
  AuctionResult result = run_engine(market, cfg, seed);
  result.diagnostics.threshold_clamped = clamped;
  return result;
}

std::optional<int> derive_allocation(const std::vector<double>& valuation_row,
                                     int bidder_index, const Billboard& billboard) {
  const int n = billboard.bidders;
  const int k = billboard.types;
  if (static_cast<int>(valuation_row.size()) != k)
    throw GuardError("valuation row length does not match billboard");
  if (bidder_index < 0 || bidder_index >= n)
    throw GuardError("bidder index out of range for billboard");
  if (static_cast<long>(billboard.rounds.size()) != billboard.halted_at)
    throw GuardError("malformed billboard: round count mismatch");
  if (billboard.multiples_price_rule)
    throw GuardError("billboard uses the bundle-auction price rule");

  const int s_eff = billboard.effective_supply;
  const double alpha = billboard.alpha;
  std::vector<int> price_level(k, 0);
  std::vector<double> released(k, 0.0);
  int mu = kUnset;
  double d = 0.0;

  for (const auto& steps : billboard.rounds) {
    if (static_cast<int>(steps.size()) != n)
      throw GuardError("malformed billboard: wrong step count in round");
    for (int q = 0; q < n; ++q) {
      const BillboardStep& step = steps[q];
      if (static_cast<int>(step.good_releases.size()) != k)
        throw GuardError("malformed billboard: wrong release count in step");
      bool bid_now = false;
      if (q == bidder_index && mu == kUnset) {
        int best = 0;
        double best_util = valuation_row[0] - price_level[0] * alpha;
        for (int j = 1; j < k; ++j) {
          double util = valuation_row[j] - price_level[j] * alpha;
          if (util > best_util) {
            best_util = util;
            best = j;
          }
        }
        if (best_util <= 0.0) {
          mu = kBot;
        } else {
          mu = best;
          bid_now = true;
        }
      }
      for (int j = 0; j < k; ++j) {
        released[j] = step.good_releases[j];
        if (released[j] >= static_cast<double>(price_level[j] + 1) * s_eff)
          ++price_level[j];
      }
      if (bid_now) d = released[mu];
    }
    if (mu >= 0 && released[mu] - d >= static_cast<double>(s_eff)) mu = kUnset;
  }
  if (mu >= 0) return mu;
  return std::nullopt;
}

AuctionResult pmatch_run_multiplicative(const Market& market,
                                        const MultiplicativeParams& params,
                                        std::uint64_t seed) {
  validate_common(params.alpha, params.epsilon, params.gamma);
  if (!(params.lambda_min > 0.0 && params.lambda_min <= 1.0))
    throw ConfigError("lambda must be in (0,1]");
  if (!(params.opt_estimate > 0.0))
    throw ConfigError("opt_estimate must be > 0");
  if (!market.has_valuations())
    throw InstanceError("multiplicative variant requires unit-demand valuations");
  for (int i = 0; i < market.bidders(); ++i)
    for (int j = 0; j < market.types(); ++j) {
      double v = market.value(i, j);
      if (v > 0.0 && v < params.lambda_min)
        throw InstanceError("nonzero valuation below the lambda floor");
    }

  long default_rounds =
      static_cast<long>(std::ceil(24.0 / (params.alpha * params.alpha)));
  DerivedAuctionParams derived =
      resolve_params(default_rounds, params.epsilon, market.bidders(), market.types(),
              params.gamma, params.overrides, /*extra_error=*/0.0);

  EngineConfig cfg;
  cfg.alpha = params.alpha;
  cfg.epsilon = params.epsilon;
  cfg.gamma = params.gamma;
  cfg.noise_off = params.noise_off;
  cfg.halt_rule = HaltRule::kBids;
  cfg.derived = derived;
  cfg.halt_threshold = params.alpha * params.opt_estimate /
                           (2.0 * params.lambda_min) -
                       2.0 * derived.error_bound;
  return run_engine(market, cfg, seed);
}

double noisy_opt_estimate(const Market& market, double epsilon_opt,
                          std::uint64_t seed) {
  if (!(epsilon_opt > 0.0)) throw ConfigError("epsilon_opt must be > 0");
  auto [outcome, opt] = exact_max_matching(market);
  Rng rng(derive_seed(seed, "opt-estimate"));
  return opt + sample_laplace(rng, 1.0 / epsilon_opt);
}

}  // namespace privauction
