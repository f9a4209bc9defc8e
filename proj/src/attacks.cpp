#include "privauction/attacks.hpp"

#include <cmath>

#include "privauction/errors.hpp"
#include "privauction/oracles.hpp"
#include "privauction/pmatch.hpp"
#include "privauction/rng.hpp"

namespace privauction {

double reconstruction_bound(double epsilon, double delta, double beta) {
  if (beta >= 1.0) throw ConfigError("beta must be < 1");
  double e = std::exp(epsilon);
  return 1.0 - (e + delta) / ((1.0 + e) * (1.0 - beta));
}

int GadgetMarket::gadget_good(int g, int bit) const {
  if (spec.variant == GadgetVariant::kAllocation) return bit;
  return 2 * g + bit;
}

GadgetMarket build_gadget_market(const GadgetSpec& spec, std::uint64_t seed) {
  const int bits = static_cast<int>(spec.database.size());
  if (bits == 0) throw InstanceError("gadget database must be nonempty");
  for (int b : spec.database)
    if (b != 0 && b != 1) throw InstanceError("database entries must be bits");

  switch (spec.variant) {
    case GadgetVariant::kPrices: {
      // Per bit: two unit-supply goods and two bidders with mirrored values.
      int n = 2 * bits;
      int k = 2 * bits;
      UnitDemandValuation v;
      v.v.assign(n, std::vector<double>(k, 0.0));
      for (int g = 0; g < bits; ++g)
        for (int b = 0; b < 2; ++b) {
          v.v[2 * g + b][2 * g] = 1.0 - spec.database[g];
          v.v[2 * g + b][2 * g + 1] = static_cast<double>(spec.database[g]);
        }
      GadgetMarket gm{Market(n, k, 1, std::move(v)), spec, {}, {}, {}};
      return gm;
    }
    case GadgetVariant::kAllocation: {
      // Two goods with "infinite" supply, realized as s = n.
      int n = bits;
      UnitDemandValuation v;
      v.v.assign(n, std::vector<double>(2, 0.0));
      for (int i = 0; i < n; ++i) {
        v.v[i][0] = 1.0 - spec.database[i];
        v.v[i][1] = static_cast<double>(spec.database[i]);
      }
      GadgetMarket gm{Market(n, 2, n, std::move(v)), spec, {}, {}, {}};
      return gm;
    }
    case GadgetVariant::kJoint: {
      if (spec.supply < 1) throw InstanceError("joint gadget needs supply >= 1");
      const int s = spec.supply;
      const double eta = spec.eta();
      int n = bits * (s + 1);
      int k = 2 * bits;
      UnitDemandValuation v;
      v.v.assign(n, std::vector<double>(k, 0.0));
      GadgetMarket gm{Market(1, 1, 1), spec, {}, {}, {}};
      gm.spy_preferred_good.resize(bits);
      gm.real_bidder.resize(bits);
      gm.spy_bidders.assign(bits, {});
      for (int g = 0; g < bits; ++g) {
        int real = g * (s + 1);
        gm.real_bidder[g] = real;
        v.v[real][2 * g] = 1.0 - spec.database[g];
        v.v[real][2 * g + 1] = static_cast<double>(spec.database[g]);
        Rng rng(derive_seed(seed, "spy-pref", g));
        int pref = static_cast<int>(rng() & 1ULL);
        gm.spy_preferred_good[g] = pref;
        for (int q = 1; q <= s; ++q) {
          int spy = real + q;
          gm.spy_bidders[g].push_back(spy);
          v.v[spy][2 * g + pref] = eta;
        }
      }
      gm.market = Market(n, k, s, std::move(v));
      return gm;
    }
  }
  throw UsageError("unknown gadget variant");
}

std::vector<int> attack_prices(const PriceVector& prices, const GadgetMarket& gm) {
  std::vector<int> guess(gm.gadgets());
  for (int g = 0; g < gm.gadgets(); ++g)
    guess[g] = prices.p[gm.gadget_good(g, 1)] > 0.5 ? 1 : 0;
  return guess;
}

std::vector<int> attack_allocation(const Outcome& outcome, const GadgetMarket& gm,
                                   std::uint64_t seed) {
  Rng rng(derive_seed(seed, "attack-allocation"));
  std::vector<int> guess(gm.gadgets());
  for (int g = 0; g < gm.gadgets(); ++g) {
    if (auto t = assigned_type(outcome.assignment[g]))
      guess[g] = *t;
    else
      guess[g] = static_cast<int>(rng() & 1ULL);
  }
  return guess;
}

std::vector<int> attack_joint(const std::vector<Assignment>& spy_assignments,
                              const GadgetMarket& gm, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "attack-joint"));
  std::vector<int> guess(gm.gadgets());
  for (int g = 0; g < gm.gadgets(); ++g) {
    bool all_zero = true, all_one = true;
    for (int spy : gm.spy_bidders[g]) {
      auto t = assigned_type(spy_assignments[spy]);
      if (!t || *t != gm.gadget_good(g, 0)) all_zero = false;
      if (!t || *t != gm.gadget_good(g, 1)) all_one = false;
    }
    if (all_zero)
      guess[g] = 1;
    else if (all_one)
      guess[g] = 0;
    else
      guess[g] = static_cast<int>(rng() & 1ULL);
  }
  return guess;
}

std::vector<AttackTrial> run_attack_experiment(const AttackExperimentConfig& config,
                                               int trials, std::uint64_t seed) {
  std::vector<AttackTrial> rows;
  rows.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = derive_seed(seed, "attack-trial", trial);
    Rng rng(derive_seed(trial_seed, "database"));
    GadgetSpec spec;
    spec.variant = config.variant;
    spec.supply = config.supply;
    spec.database.resize(config.bits);
    for (int& b : spec.database) b = static_cast<int>(rng() & 1ULL);

    GadgetMarket gm = build_gadget_market(spec, trial_seed);
    auto [opt_outcome, opt] = exact_max_matching(gm.market);

    Outcome outcome;
    switch (config.mechanism) {
      case AttackMechanism::kExactMatching:
        outcome = opt_outcome;
        break;
      case AttackMechanism::kKelsoCrawford:
        outcome = kelso_crawford(gm.market, config.alpha).first;
        break;
      case AttackMechanism::kPMatch: {
        PMatchParams params;
        params.alpha = config.alpha;
        params.rho = config.rho;
        params.epsilon = config.epsilon;
        params.gamma = config.gamma;
        params.noise_off = config.noise_off;
        params.overrides.error_bound = config.override_error_bound;
        params.overrides.reserve = config.override_reserve;
        outcome = pmatch_run(gm.market, params, trial_seed).outcome;
        break;
      }
    }

    std::vector<int> guess;
    switch (config.variant) {
      case GadgetVariant::kPrices:
        guess = attack_prices(outcome.prices, gm);
        break;
      case GadgetVariant::kAllocation:
        guess = attack_allocation(outcome, gm, trial_seed);
        break;
      case GadgetVariant::kJoint:
        guess = attack_joint(outcome.assignment, gm, trial_seed);
        break;
    }
    int errors = hamming_distance(guess, spec.database);
    rows.push_back({trial, opt - outcome.welfare,
                    1.0 - static_cast<double>(errors) / config.bits});
  }
  return rows;
}

}  // namespace privauction
