#pragma once

// Shared test helpers: independent brute-force oracles kept deliberately
// separate from the library implementations they cross-check.

#include <vector>

#include "privauction/market.hpp"

namespace testutil {

// Exhaustive max-weight matching for unit-demand markets (n <= ~8). Each
// bidder is assigned a type with remaining supply or left unmatched.
inline double brute_force_matching(const privauction::Market& market) {
  const int n = market.bidders();
  const int k = market.types();
  std::vector<int> remaining(market.supplies());
  double best = 0.0;
  auto rec = [&](auto&& self, int i, double welfare) -> void {
    if (i == n) {
      if (welfare > best) best = welfare;
      return;
    }
    self(self, i + 1, welfare);  // unmatched
    for (int j = 0; j < k; ++j) {
      if (remaining[j] == 0) continue;
      --remaining[j];
      self(self, i + 1, welfare + market.value(i, j));
      ++remaining[j];
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

}  // namespace testutil
