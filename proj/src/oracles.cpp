#include "privauction/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "privauction/errors.hpp"
#include "privauction/palloc.hpp"

namespace privauction {

namespace {

// Min-cost max-flow (successive shortest paths, SPFA) specialized to the
// bipartite assignment graph: source -> bidder (cap 1), bidder -> type
// (cap 1, cost -v), type -> sink (cap supply). Augments one unit at a time
// while the shortest path still improves welfare.
struct FlowGraph {
  struct Arc {
    int to;
    int cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Arc>> adj;

  explicit FlowGraph(int nodes) : adj(nodes) {}

  void add_arc(int from, int to, int cap, double cost) {
    adj[from].push_back({to, cap, cost, static_cast<int>(adj[to].size())});
    adj[to].push_back({from, 0, -cost, static_cast<int>(adj[from].size()) - 1});
  }
};

}  // namespace

std::pair<Outcome, double> exact_max_matching(const Market& market) {
  if (!market.has_valuations())
    throw InstanceError("exact_max_matching requires unit-demand valuations");
  const int n = market.bidders();
  const int k = market.types();
  const int source = 0;
  const int sink = n + k + 1;
  FlowGraph g(n + k + 2);
  for (int i = 0; i < n; ++i) {
    g.add_arc(source, 1 + i, 1, 0.0);
    for (int j = 0; j < k; ++j)
      g.add_arc(1 + i, 1 + n + j, 1, -market.value(i, j));
  }
  for (int j = 0; j < k; ++j)
    g.add_arc(1 + n + j, sink, market.supply(j), 0.0);

  const double inf = std::numeric_limits<double>::infinity();
  const int nodes = n + k + 2;
  while (true) {
    std::vector<double> dist(nodes, inf);
    std::vector<int> prev_node(nodes, -1), prev_arc(nodes, -1);
    std::vector<char> in_queue(nodes, 0);
    std::deque<int> queue;
    dist[source] = 0.0;
    queue.push_back(source);
    in_queue[source] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      in_queue[u] = 0;
      for (int a = 0; a < static_cast<int>(g.adj[u].size()); ++a) {
        const auto& arc = g.adj[u][a];
        if (arc.cap <= 0) continue;
        double nd = dist[u] + arc.cost;
        if (nd < dist[arc.to] - 1e-12) {
          dist[arc.to] = nd;
          prev_node[arc.to] = u;
          prev_arc[arc.to] = a;
          if (!in_queue[arc.to]) {
            queue.push_back(arc.to);
            in_queue[arc.to] = 1;
          }
        }
      }
    }
    // Only augment while strictly welfare-improving.
    if (!(dist[sink] < -1e-9)) break;
    for (int v = sink; v != source; v = prev_node[v]) {
      auto& arc = g.adj[prev_node[v]][prev_arc[v]];
      arc.cap -= 1;
      g.adj[v][arc.rev].cap += 1;
    }
  }

  Outcome outcome;
  outcome.prices.p.assign(k, 0.0);
  outcome.assignment.assign(n, std::monostate{});
  double opt = 0.0;
  for (int i = 0; i < n; ++i) {
    for (const auto& arc : g.adj[1 + i]) {
      int j = arc.to - 1 - n;
      if (j >= 0 && j < k && arc.cap == 0) {  // saturated bidder->type arc
        outcome.assignment[i] = j;
        opt += market.value(i, j);
        break;
      }
    }
  }
  outcome.welfare = opt;
  return {std::move(outcome), opt};
}

std::pair<Outcome, double> exact_max_allocation(const Market& market,
                                                const BundleValuationOracle& oracle,
                                                int max_bundle_size) {
  const int n = market.bidders();
  const int k = market.types();
  std::vector<int> supply = market.supplies();
  std::vector<Bundle> all_bundles = enumerate_bundles(
      std::vector<int>(supply.begin(), supply.end()), max_bundle_size);

  long states = 0;
  constexpr long kStateGuard = 10'000'000;
  double best = -1.0;
  std::vector<int> best_choice(n, 0), choice(n, 0);
  std::vector<int> remaining = supply;

  auto fits = [&](const Bundle& b) {
    for (int j = 0; j < k; ++j)
      if (b.counts[j] > remaining[j]) return false;
    return true;
  };

  auto rec = [&](auto&& self, int i, double welfare) -> void {
    if (++states > kStateGuard)
      throw GuardError("exact_max_allocation: instance too large (>1e7 states)");
    if (i == n) {
      if (welfare > best) {
        best = welfare;
        best_choice = choice;
      }
      return;
    }
    for (int b = 0; b < static_cast<int>(all_bundles.size()); ++b) {
      const Bundle& bundle = all_bundles[b];
      if (!fits(bundle)) continue;
      for (int j = 0; j < k; ++j) remaining[j] -= bundle.counts[j];
      choice[i] = b;
      self(self, i + 1, welfare + oracle.value(i, bundle));
      for (int j = 0; j < k; ++j) remaining[j] += bundle.counts[j];
    }
  };
  rec(rec, 0, 0.0);

  Outcome outcome;
  outcome.prices.p.assign(k, 0.0);
  outcome.assignment.resize(n);
  for (int i = 0; i < n; ++i) outcome.assignment[i] = all_bundles[best_choice[i]];
  outcome.welfare = best;
  return {std::move(outcome), best};
}

std::pair<Outcome, PriceVector> kelso_crawford(const Market& market,
                                               const BundleValuationOracle& oracle,
                                               double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
  const int n = market.bidders();
  const int k = market.types();

  std::vector<BundleState> state(n);
  std::vector<long> counts(k, 0);
  std::vector<int> price_level(k, 0);
  PriceVector prices;
  prices.p.assign(k, 0.0);

  // Every s bids on a type raise its price by alpha, and prices stop rising
  // once no bidder demands at >= 1, so total bids are bounded.
  long max_bids = 0;
  for (int j = 0; j < k; ++j)
    max_bids += static_cast<long>(market.supply(j)) *
                (static_cast<long>(std::ceil(1.0 / alpha)) + 2);
  const long round_guard = max_bids + 2;

  for (long round = 0; round < round_guard; ++round) {
    bool any_bid = false;
    for (int i = 0; i < n; ++i) {
      auto& copies = state[i].copies;
      copies.erase(std::remove_if(copies.begin(), copies.end(),
                                  [&](const HeldCopy& c) {
                                    return counts[c.type] - c.saved_count >=
                                           static_cast<double>(
                                               market.supply(c.type));
                                  }),
                   copies.end());
      if (auto j = demand_step(oracle, i, state[i], prices)) {
        any_bid = true;
        // Saved count includes the own bid: outbid after s subsequent bids.
        copies.push_back(
            {*j, static_cast<double>(counts[*j] + 1), prices.p[*j]});
        counts[*j] += 1;
        int multiples = static_cast<int>(counts[*j] / market.supply(*j));
        if (multiples > price_level[*j]) {
          price_level[*j] = multiples;
          prices.p[*j] = price_level[*j] * alpha;
        }
      }
    }
    if (!any_bid) {
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
      return {std::move(outcome), prices};
    }
  }
  throw InstanceError("kelso_crawford did not reach quiescence (prices beyond "
                      "1 + alpha with persistent demand)");
}

std::pair<Outcome, PriceVector> kelso_crawford(const Market& market, double alpha) {
  if (!market.has_valuations())
    throw InstanceError("unit-demand kelso_crawford needs a valuation matrix");
  BundleValuationOracle oracle = unit_demand_as_bundle_oracle(market.valuations());
  auto [outcome, prices] = kelso_crawford(market, oracle, alpha);
  // Report unit-demand results as type / unmatched assignments.
  for (auto& a : outcome.assignment) {
    Bundle b = std::get<Bundle>(a);
    int type = -1;
    for (int j = 0; j < market.types(); ++j)
      if (b.counts[j] > 0) {
        type = j;
        break;
      }
    if (type < 0)
      a = std::monostate{};
    else
      a = type;
  }
  return {std::move(outcome), prices};
}

EquilibriumReport verify_matching_equilibrium(const Market& market,
                                              const Outcome& outcome,
                                              double alpha) {
  const int n = market.bidders();
  const int k = market.types();
  EquilibriumReport report;
  try {
    check_feasible(market, outcome.assignment);
  } catch (const InstanceError&) {
    report.feasible = false;
  }

  std::vector<int> assigned(k, 0);
  int unsatisfied = 0;
  for (int i = 0; i < n; ++i) {
    double utility = 0.0;  // unmatched: value 0, price 0
    if (auto t = assigned_type(outcome.assignment[i])) {
      utility = market.value(i, *t) - outcome.prices.p[*t];
      assigned[*t] += 1;
    }
    double best = 0.0;
    for (int j = 0; j < k; ++j)
      best = std::max(best, market.value(i, j) - outcome.prices.p[j]);
    double regret = std::max(0.0, best - utility);
    if (regret > alpha)
      ++unsatisfied;
    else
      report.measured_alpha = std::max(report.measured_alpha, regret);
  }
  report.measured_rho = static_cast<double>(unsatisfied) / n;
  for (int j = 0; j < k; ++j)
    if (outcome.prices.p[j] > 0.0)
      report.measured_beta =
          std::max(report.measured_beta, market.supply(j) - assigned[j]);
  return report;
}

EquilibriumReport verify_allocation_equilibrium(const Market& market,
                                                const BundleValuationOracle& oracle,
                                                const Outcome& outcome,
                                                int max_bundle_size, double alpha) {
  const int n = market.bidders();
  const int k = market.types();
  EquilibriumReport report;
  try {
    check_feasible(market, outcome.assignment);
  } catch (const InstanceError&) {
    report.feasible = false;
  }

  std::vector<Bundle> all_bundles = enumerate_bundles(market.supplies(),
                                                      max_bundle_size);
  std::vector<int> assigned(k, 0);
  int unsatisfied = 0;
  for (int i = 0; i < n; ++i) {
    Bundle held = assignment_bundle(outcome.assignment[i], k);
    for (int j = 0; j < k; ++j) assigned[j] += held.counts[j];
    double utility = oracle.value(i, held) - outcome.prices.total(held);
    double best = 0.0;
    for (const Bundle& b : all_bundles)
      best = std::max(best, oracle.value(i, b) - outcome.prices.total(b));
    double regret = std::max(0.0, best - utility);
    double slack = alpha * held.size();
    if (regret > slack + 1e-12) {
      ++unsatisfied;
    } else {
      report.measured_alpha = std::max(
          report.measured_alpha, regret / std::max(1, held.size()));
    }
  }
  report.measured_rho = static_cast<double>(unsatisfied) / market.market_size();
  for (int j = 0; j < k; ++j)
    if (outcome.prices.p[j] > 0.0)
      report.measured_beta =
          std::max(report.measured_beta, market.supply(j) - assigned[j]);
  return report;
}

GsCheckResult check_gross_substitutes(const BundleValuationOracle& oracle,
                                      int bidder, int k, int s, int max_bundle_size,
                                      double price_grid_step) {
  if (!(price_grid_step > 0.0 && price_grid_step <= 1.0))
    throw ConfigError("price grid step must be in (0,1]");
  const int levels = static_cast<int>(std::floor(1.0 / price_grid_step + 1e-9));
  std::vector<Bundle> bundles =
      enumerate_bundles(std::vector<int>(k, s), max_bundle_size);

  // All grid price vectors, as level tuples.
  std::vector<std::vector<int>> grid;
  std::vector<int> cur(k, 0);
  auto gen = [&](auto&& self, int j) -> void {
    if (j == k) {
      grid.push_back(cur);
      return;
    }
    for (int l = 0; l <= levels; ++l) {
      cur[j] = l;
      self(self, j + 1);
    }
  };
  gen(gen, 0);

  auto to_prices = [&](const std::vector<int>& lv) {
    PriceVector p;
    p.p.resize(k);
    for (int j = 0; j < k; ++j) p.p[j] = lv[j] * price_grid_step;
    return p;
  };

  // Most-demanded bundle sets per grid point.
  std::vector<std::vector<int>> demanded(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    PriceVector p = to_prices(grid[gi]);
    double best = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < static_cast<int>(bundles.size()); ++b)
      best = std::max(best, oracle.value(bidder, bundles[b]) -
                                p.total(bundles[b]));
    for (int b = 0; b < static_cast<int>(bundles.size()); ++b)
      if (oracle.value(bidder, bundles[b]) - p.total(bundles[b]) >= best - 1e-9)
        demanded[gi].push_back(b);
  }

  for (std::size_t lo = 0; lo < grid.size(); ++lo) {
    for (std::size_t hi = 0; hi < grid.size(); ++hi) {
      bool leq = true;
      for (int j = 0; j < k; ++j)
        if (grid[lo][j] > grid[hi][j]) leq = false;
      if (!leq) continue;
      for (int b : demanded[lo]) {
        // Sub-bundle on types whose price did not change.
        Bundle fixed(k);
        for (int j = 0; j < k; ++j)
          if (grid[lo][j] == grid[hi][j])
            fixed.counts[j] = bundles[b].counts[j];
        bool covered = false;
        for (int b2 : demanded[hi])
          if (fixed.subset_of(bundles[b2])) {
            covered = true;
            break;
          }
        if (!covered) {
          GsCheckResult result;
          result.passes = false;
          result.witness =
              GsWitness{to_prices(grid[lo]), to_prices(grid[hi]), bundles[b]};
          return result;
        }
      }
    }
  }
  return GsCheckResult{};
}

}  // namespace privauction
