#include "privauction/market.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "privauction/errors.hpp"

namespace privauction {

int Bundle::size() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

bool Bundle::subset_of(const Bundle& other) const {
  if (counts.size() != other.counts.size()) return false;
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j] > other.counts[j]) return false;
  return true;
}

void UnitDemandValuation::validate() const {
  for (const auto& row : v) {
    if (row.size() != v[0].size())
      throw InstanceError("valuation matrix is ragged");
    for (double x : row)
      if (!(x >= 0.0 && x <= 1.0))
        throw InstanceError("valuation entry outside [0,1]");
  }
}

double BundleValuationOracle::value(int bidder, const Bundle& bundle) const {
  if (bundle.empty()) return 0.0;
  double val = value_(bidder, bundle);
  if (!(val >= 0.0 && val <= 1.0))
    throw InstanceError("bundle oracle returned a value outside [0,1]");
  return val;
}

Market::Market(int n, int k, int s, UnitDemandValuation valuations)
    : Market(n, k, std::vector<int>(static_cast<std::size_t>(k), s),
             std::move(valuations)) {}

Market::Market(int n, int k, std::vector<int> supply, UnitDemandValuation valuations)
    : n_(n), k_(k), supply_(std::move(supply)), valuations_(std::move(valuations)) {
  if (n_ < 1 || k_ < 1) throw InstanceError("market needs n >= 1 and k >= 1");
  if (static_cast<int>(supply_.size()) != k_)
    throw InstanceError("supply vector length must equal k");
  for (int s : supply_)
    if (s < 1) throw InstanceError("every supply must be >= 1");
  if (!valuations_.v.empty()) {
    valuations_.validate();
    if (valuations_.bidders() != n_ || valuations_.types() != k_)
      throw InstanceError("valuation matrix must be n x k");
  }
}

int Market::min_supply() const {
  return *std::min_element(supply_.begin(), supply_.end());
}

int Market::market_size() const {
  return std::accumulate(supply_.begin(), supply_.end(), 0);
}

Bundle assignment_bundle(const Assignment& a, int k) {
  Bundle b(k);
  if (const int* t = std::get_if<int>(&a)) {
    b.counts[*t] += 1;
  } else if (const Bundle* g = std::get_if<Bundle>(&a)) {
    b = *g;
  }
  return b;
}

double PriceVector::total(const Bundle& bundle) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) sum += p[j] * bundle.counts[j];
  return sum;
}

void check_feasible(const Market& market, const std::vector<Assignment>& assignment) {
  if (static_cast<int>(assignment.size()) != market.bidders())
    throw InstanceError("assignment length must equal bidder count");
  std::vector<int> demand(market.types(), 0);
  for (const Assignment& a : assignment) {
    Bundle b = assignment_bundle(a, market.types());
    for (int j = 0; j < market.types(); ++j) demand[j] += b.counts[j];
  }
  for (int j = 0; j < market.types(); ++j)
    if (demand[j] > market.supply(j))
      throw InstanceError("assignment exceeds supply of type " + std::to_string(j));
}

double social_welfare(const Market& market, const std::vector<Assignment>& assignment) {
  check_feasible(market, assignment);
  double sum = 0.0;
  for (int i = 0; i < market.bidders(); ++i)
    if (auto t = assigned_type(assignment[i])) sum += market.value(i, *t);
  return sum;
}

double social_welfare(const Market& market, const BundleValuationOracle& oracle,
                      const std::vector<Assignment>& assignment) {
  check_feasible(market, assignment);
  double sum = 0.0;
  for (int i = 0; i < market.bidders(); ++i)
    sum += oracle.value(i, assignment_bundle(assignment[i], market.types()));
  return sum;
}

BundleValuationOracle unit_demand_as_bundle_oracle(const UnitDemandValuation& v) {
  return BundleValuationOracle(
      [v](int bidder, const Bundle& bundle) {
        double best = 0.0;
        for (std::size_t j = 0; j < bundle.counts.size(); ++j)
          if (bundle.counts[j] > 0) best = std::max(best, v.v[bidder][j]);
        return best;
      },
      /*max_bundle_size=*/1);
}

BundleValuationOracle additive_oracle(const std::vector<std::vector<double>>& per_copy,
                                      int max_bundle_size, double cap) {
  return BundleValuationOracle(
      [per_copy, cap](int bidder, const Bundle& bundle) {
        double sum = 0.0;
        for (std::size_t j = 0; j < bundle.counts.size(); ++j)
          sum += per_copy[bidder][j] * bundle.counts[j];
        return std::min(sum, cap);
      },
      max_bundle_size);
}

std::vector<Bundle> enumerate_bundles(const std::vector<int>& max_per_type,
                                      int max_total) {
  int k = static_cast<int>(max_per_type.size());
  std::vector<Bundle> out;
  Bundle current(k);
  // depth-first over types, lexicographic by construction
  auto rec = [&](auto&& self, int type, int remaining) -> void {
    if (type == k) {
      out.push_back(current);
      return;
    }
    int cap = std::min(max_per_type[type], remaining);
    for (int c = 0; c <= cap; ++c) {
      current.counts[type] = c;
      self(self, type + 1, remaining - c);
    }
    current.counts[type] = 0;
  };
  rec(rec, 0, max_total);
  return out;
}

namespace {
std::vector<int> parse_supply(const nlohmann::json& js, int k) {
  if (js.is_number_integer()) return std::vector<int>(k, js.get<int>());
  if (js.is_array()) return js.get<std::vector<int>>();
  throw InstanceError("field 's' must be an int or a length-k array");
}
}  // namespace

Market parse_market_json(const std::string& text) {
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("bad instance JSON: ") + e.what());
  }
  int n = js.at("n").get<int>();
  int k = js.at("k").get<int>();
  UnitDemandValuation vals;
  if (js.contains("valuations"))
    vals.v = js.at("valuations").get<std::vector<std::vector<double>>>();
  return Market(n, k, parse_supply(js.at("s"), k), std::move(vals));
}

Market load_market_json(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market_json(buf.str());
}

std::string market_to_json(const Market& market) {
  nlohmann::json js;
  js["n"] = market.bidders();
  js["k"] = market.types();
  bool uniform = market.min_supply() == *std::max_element(market.supplies().begin(),
                                                          market.supplies().end());
  if (uniform)
    js["s"] = market.min_supply();
  else
    js["s"] = market.supplies();
  if (market.has_valuations()) js["valuations"] = market.valuations().v;
  return js.dump(2);
}

BundleInstance load_bundle_instance_json(std::istream& in, int max_bundle_size) {
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("bad instance JSON: ") + e.what());
  }
  int n = js.at("n").get<int>();
  int k = js.at("k").get<int>();
  Market market(n, k, parse_supply(js.at("s"), k));

  // (bidder, counts) -> value table; unlisted bundles are worth 0.
  auto table = std::make_shared<std::map<std::pair<int, std::vector<int>>, double>>();
  for (const auto& row : js.at("bundles")) {
    int bidder = row.at("bidder").get<int>();
    std::vector<int> counts = row.at("counts").get<std::vector<int>>();
    double value = row.at("value").get<double>();
    int total = std::accumulate(counts.begin(), counts.end(), 0);
    if (total > max_bundle_size)
      throw InstanceError("bundle table entry exceeds the bundle-size cap");
    (*table)[{bidder, counts}] = value;
  }
  BundleValuationOracle oracle(
      [table](int bidder, const Bundle& bundle) {
        auto it = table->find({bidder, bundle.counts});
        return it == table->end() ? 0.0 : it->second;
      },
      max_bundle_size);
  return BundleInstance{std::move(market), std::move(oracle)};
}

}  // namespace privauction
