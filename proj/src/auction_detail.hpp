#pragma once

#include <cmath>
#include <string>

#include "privauction/errors.hpp"
#include "privauction/pmatch.hpp"

namespace privauction::detail {

inline void validate_common(double alpha, double epsilon, double gamma) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
}

inline double error_bound_formula(double counter_epsilon, long n_times_t, int k,
                                  double gamma) {
  double log_nt = std::log2(static_cast<double>(n_times_t));
  return (2.0 * std::sqrt(2.0) / counter_epsilon) * std::pow(log_nt, 2.5) *
         std::log(4.0 * k / gamma);
}

// E is rounded up to an integer before m = 2E + 1. `extra_error` carries the
// "+1" of the bundle-auction parameterization.
inline DerivedAuctionParams resolve_params(long default_rounds, double epsilon,
                                           int n, int k, double gamma,
                                           const AuctionOverrides& overrides,
                                           double extra_error) {
  DerivedAuctionParams d;
  d.rounds = overrides.rounds.value_or(default_rounds);
  if (d.rounds < 1) throw ConfigError("round count T must be >= 1");
  d.counter_epsilon = epsilon / (2.0 * static_cast<double>(d.rounds));
  if (overrides.error_bound) {
    d.error_bound = *overrides.error_bound;
  } else {
    double e = error_bound_formula(d.counter_epsilon,
                                   static_cast<long>(n) * d.rounds, k, gamma) +
               extra_error;
    d.error_bound = std::ceil(e);
  }
  d.reserve = overrides.reserve.value_or(
      2 * static_cast<int>(std::llround(std::ceil(d.error_bound))) + 1);
  return d;
}

}  // namespace privauction::detail
