#pragma once

#include <cstdint>
#include <vector>

#include "privauction/rng.hpp"

namespace privauction {

enum class NoiseMode { kLaplace, kOff };

struct CounterConfig {
  double epsilon = 1.0;
  long horizon = 1;
  NoiseMode noise_mode = NoiseMode::kLaplace;
  bool monotonize = false;
  std::uint64_t rng_seed = 0;
};

struct CounterTraceRow {
  long t;
  int bit;
  long exact_count;
  double released_count;
};

// Binary Mechanism streaming counter. Feeding bit sigma(t) at step t
// finalizes the dyadic block ending at t, perturbs it with one Laplace draw
// of scale log2(horizon)/epsilon, and releases the sum of the noisy blocks
// selected by the 1-bits of t. An optional running maximum makes the release
// sequence nondecreasing; it is pure post-processing of the releases.
class BinaryCounter {
 public:
  explicit BinaryCounter(const CounterConfig& config);

  // Advances the stream by one bit and returns the released count B(t).
  // Throws ConfigError past the horizon.
  double feed(int bit);

  long step() const { return t_; }
  long horizon() const { return config_.horizon; }
  long exact_count() const { return exact_; }
  double last_release() const { return last_release_; }
  // Number of noisy blocks summed into the latest release (= popcount(t)).
  int active_block_count() const;

  void enable_trace() { trace_enabled_ = true; }
  const std::vector<CounterTraceRow>& trace() const { return trace_; }

 private:
  CounterConfig config_;
  double noise_scale_;
  long t_ = 0;
  long exact_ = 0;
  double last_release_ = 0.0;
  double running_max_ = 0.0;
  std::vector<long> block_sums_;    // a_i, exact dyadic-block sums
  std::vector<double> noisy_sums_;  // a-hat_i, released block values
  Rng rng_;
  bool trace_enabled_ = false;
  std::vector<CounterTraceRow> trace_;
};

// Usefulness bound of the Binary Mechanism: with probability >= 1 - beta all
// releases are within (2*sqrt(2)/epsilon) * ln(2/beta) * (log2 T)^(5/2) of
// the exact prefix sums. Logarithm base 2 matches the dyadic block count.
double counter_accuracy_bound(double epsilon, long horizon, double beta);

}  // namespace privauction
