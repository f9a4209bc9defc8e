#include "privauction/counter.hpp"

#include <bit>
#include <cmath>

#include "privauction/errors.hpp"

namespace privauction {

namespace {
int block_index_count(long horizon) {
  // Highest dyadic block index that can finalize within the horizon.
  int bits = 0;
  while ((1L << bits) <= horizon) ++bits;
  return bits;
}
}  // namespace

BinaryCounter::BinaryCounter(const CounterConfig& config)
    : config_(config),
      noise_scale_(std::log2(static_cast<double>(std::max(config.horizon, 2L))) /
                   config.epsilon),
      block_sums_(block_index_count(config.horizon), 0),
      noisy_sums_(block_index_count(config.horizon), 0.0),
      rng_(config.rng_seed) {
  if (config_.epsilon <= 0.0) throw ConfigError("counter epsilon must be > 0");
  if (config_.horizon < 1) throw ConfigError("counter horizon must be >= 1");
}

double BinaryCounter::feed(int bit) {
  if (t_ >= config_.horizon)
    throw ConfigError("counter fed past its horizon T=" +
                      std::to_string(config_.horizon));
  ++t_;
  exact_ += bit;

  // i = index of the lowest set bit of t; block a_i absorbs the lower blocks
  // plus the new bit, covering [t - 2^i + 1, t].
  int i = std::countr_zero(static_cast<unsigned long>(t_));
  long sum = bit;
  for (int j = 0; j < i; ++j) {
    sum += block_sums_[j];
    block_sums_[j] = 0;
    noisy_sums_[j] = 0.0;
  }
  block_sums_[i] = sum;
  noisy_sums_[i] = static_cast<double>(sum);
  if (config_.noise_mode == NoiseMode::kLaplace)
    noisy_sums_[i] += sample_laplace(rng_, noise_scale_);

  double release = 0.0;
  for (unsigned long rem = static_cast<unsigned long>(t_); rem != 0;
       rem &= rem - 1)
    release += noisy_sums_[std::countr_zero(rem)];

  if (config_.monotonize) {
    running_max_ = std::max(running_max_, release);
    release = running_max_;
  }
  last_release_ = release;
  if (trace_enabled_) trace_.push_back({t_, bit, exact_, release});
  return release;
}

int BinaryCounter::active_block_count() const {
  return std::popcount(static_cast<unsigned long>(t_));
}

double counter_accuracy_bound(double epsilon, long horizon, double beta) {
  if (epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
  if (horizon < 2) throw ConfigError("horizon must be >= 2");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must be in (0,1)");
  double log_t = std::log2(static_cast<double>(horizon));
  return (2.0 * std::sqrt(2.0) / epsilon) * std::log(2.0 / beta) *
         std::pow(log_t, 2.5);
}

}  // namespace privauction
