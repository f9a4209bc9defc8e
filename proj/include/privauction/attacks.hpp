#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privauction/market.hpp"

namespace privauction {

// Reconstruction lower bound c(eps, delta, beta) = 1 - (e^eps + delta) /
// ((1 + e^eps)(1 - beta)): no (eps, delta)-private mechanism reconstructs
// more than a 1 - c fraction of its input bits.
double reconstruction_bound(double epsilon, double delta, double beta);

enum class GadgetVariant { kPrices, kAllocation, kJoint };

struct GadgetSpec {
  GadgetVariant variant = GadgetVariant::kAllocation;
  std::vector<int> database;  // the private bit vector D
  int supply = 1;             // joint variant gadget supply
  double eta() const { return 1.0 / (4.0 * supply); }
};

// Built market plus the bookkeeping the attacks need.
struct GadgetMarket {
  Market market;
  GadgetSpec spec;
  // joint variant: per gadget, the good (0 or 1) the spies prefer, and the
  // bidder indices of real and spy bidders.
  std::vector<int> spy_preferred_good;
  std::vector<int> real_bidder;
  std::vector<std::vector<int>> spy_bidders;

  int gadgets() const { return static_cast<int>(spec.database.size()); }
  // Global good-type index of good `bit` (0 or 1) in gadget g.
  int gadget_good(int g, int bit) const;
};

GadgetMarket build_gadget_market(const GadgetSpec& spec, std::uint64_t seed);

// Thresholds each gadget's good-1 price at 1/2.
std::vector<int> attack_prices(const PriceVector& prices, const GadgetMarket& gm);

// Reads each bidder's assigned good as the bit; unmatched bidders get a
// seeded uniform bit.
std::vector<int> attack_allocation(const Outcome& outcome, const GadgetMarket& gm,
                                   std::uint64_t seed);

// Joint-DP adversary view: only the spies' assignments. All spies on the
// gadget's 0-good means bit 1, all on the 1-good means bit 0, anything else
// a seeded uniform bit.
std::vector<int> attack_joint(const std::vector<Assignment>& spy_assignments,
                              const GadgetMarket& gm, std::uint64_t seed);

inline int hamming_distance(const std::vector<int>& a, const std::vector<int>& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

enum class AttackMechanism { kPMatch, kKelsoCrawford, kExactMatching };

struct AttackTrial {
  int trial;
  double welfare_gap;
  double reconstructed_fraction;
};

struct AttackExperimentConfig {
  GadgetVariant variant = GadgetVariant::kAllocation;
  AttackMechanism mechanism = AttackMechanism::kExactMatching;
  int bits = 32;
  int supply = 4;  // joint variant
  // pmatch parameters (used when mechanism == kPMatch)
  double alpha = 0.25;
  double rho = 0.25;
  double epsilon = 10.0;
  double gamma = 0.1;
  bool noise_off = false;
  std::optional<double> override_error_bound;
  std::optional<int> override_reserve;
};

// Per trial: draw a random database, build the gadget market, run the
// mechanism, attack, and record the welfare gap and reconstructed fraction.
std::vector<AttackTrial> run_attack_experiment(const AttackExperimentConfig& config,
                                               int trials, std::uint64_t seed);

}  // namespace privauction
