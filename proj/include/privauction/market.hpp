#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace privauction {

// A bundle of goods, represented as copies held per type. Goods of the same
// type are interchangeable, so there is no per-copy identity anywhere.
struct Bundle {
  std::vector<int> counts;

  Bundle() = default;
  explicit Bundle(int k) : counts(k, 0) {}

  int size() const;
  bool empty() const { return size() == 0; }
  // componentwise <=
  bool subset_of(const Bundle& other) const;

  bool operator==(const Bundle& other) const { return counts == other.counts; }
};

// Per-bidder valuations in the unit-demand case: v[i][j] in [0,1] is bidder
// i's value for a single copy of type j.
struct UnitDemandValuation {
  std::vector<std::vector<double>> v;

  int bidders() const { return static_cast<int>(v.size()); }
  int types() const { return v.empty() ? 0 : static_cast<int>(v[0].size()); }
  void validate() const;
};

// Black-box bundle valuation. Queries are answered on type-multiplicity
// vectors; value(i, {}) must be 0 and all values must lie in [0,1].
// max_bundle_size caps exhaustive demand searches.
class BundleValuationOracle {
 public:
  using Fn = std::function<double(int bidder, const Bundle&)>;

  BundleValuationOracle(Fn value, int max_bundle_size)
      : value_(std::move(value)), max_bundle_size_(max_bundle_size) {}

  // Checks the [0,1] contract on every query.
  double value(int bidder, const Bundle& bundle) const;
  int max_bundle_size() const { return max_bundle_size_; }

 private:
  Fn value_;
  int max_bundle_size_;
};

// A market instance: n bidders, k good types, per-type supply. For theorem
// parameter formulas the scalar supply s is the minimum over types.
class Market {
 public:
  Market(int n, int k, int s, UnitDemandValuation valuations = {});
  Market(int n, int k, std::vector<int> supply, UnitDemandValuation valuations = {});

  int bidders() const { return n_; }
  int types() const { return k_; }
  int supply(int type) const { return supply_[type]; }
  const std::vector<int>& supplies() const { return supply_; }
  int min_supply() const;
  // Market size d: total number of goods including identical copies.
  int market_size() const;
  bool has_valuations() const { return !valuations_.v.empty(); }
  const UnitDemandValuation& valuations() const { return valuations_; }
  double value(int bidder, int type) const { return valuations_.v[bidder][type]; }

 private:
  int n_;
  int k_;
  std::vector<int> supply_;
  UnitDemandValuation valuations_;
};

// Per-bidder assignment: unmatched, a single good type, or a bundle.
using Assignment = std::variant<std::monostate, int, Bundle>;

inline bool is_unmatched(const Assignment& a) {
  return std::holds_alternative<std::monostate>(a);
}
inline std::optional<int> assigned_type(const Assignment& a) {
  if (const int* t = std::get_if<int>(&a)) return *t;
  return std::nullopt;
}
// Any assignment viewed as a type-multiplicity vector (unmatched = empty).
Bundle assignment_bundle(const Assignment& a, int k);

struct PriceVector {
  std::vector<double> p;

  int types() const { return static_cast<int>(p.size()); }
  double total(const Bundle& bundle) const;
};

struct Outcome {
  PriceVector prices;
  std::vector<Assignment> assignment;
  double welfare = 0.0;
};

// Throws FeasibilityError (InstanceError) if per-type demand exceeds supply.
void check_feasible(const Market& market, const std::vector<Assignment>& assignment);

// Sum of v_i(assignment_i) under unit-demand valuations, v_i(unmatched) = 0.
double social_welfare(const Market& market, const std::vector<Assignment>& assignment);

// Bundle-oracle welfare.
double social_welfare(const Market& market, const BundleValuationOracle& oracle,
                      const std::vector<Assignment>& assignment);

// Lifts a unit-demand matrix to a bundle oracle: v_i(S) = max over types
// present in S of v_ij, empty bundle worth 0.
BundleValuationOracle unit_demand_as_bundle_oracle(const UnitDemandValuation& v);

// Additive-per-copy oracle capped at `cap`, handy as a GS test valuation.
BundleValuationOracle additive_oracle(const std::vector<std::vector<double>>& per_copy,
                                      int max_bundle_size, double cap = 1.0);

// All bundles with counts[j] <= max_per_type[j] and total size <= max_total,
// in lexicographic order (the empty bundle first).
std::vector<Bundle> enumerate_bundles(const std::vector<int>& max_per_type,
                                      int max_total);

// Instance file IO. JSON schema: {n, k, s (int or length-k array),
// valuations: n x k array of floats in [0,1]}.
Market load_market_json(std::istream& in);
Market parse_market_json(const std::string& text);
std::string market_to_json(const Market& market);

// Bundle-oracle instances: {n, k, s, bundles: [{bidder, counts, value}, ...]},
// total bundle size <= b. Unlisted nonempty bundles are worth 0.
struct BundleInstance {
  Market market;
  BundleValuationOracle oracle;
};
BundleInstance load_bundle_instance_json(std::istream& in, int max_bundle_size);

}  // namespace privauction
