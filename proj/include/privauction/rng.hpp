#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace privauction {

// Seed splitting. Every stochastic component receives its own stream derived
// from a single root seed via derive_seed(root, tag, indices...). The rule is
// splitmix64 applied to the running hash after mixing in each component, so
// streams are stable across platforms and runs.
namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t hash_tag(std::string_view tag) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
  return detail::mix(root, detail::hash_tag(tag));
}

template <typename... Idx>
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, Idx... idx) {
  std::uint64_t h = detail::mix(root, detail::hash_tag(tag));
  ((h = detail::mix(h, static_cast<std::uint64_t>(idx))), ...);
  return h;
}

using Rng = std::mt19937_64;

// Inverse-CDF Laplace(0, scale) sample. One call consumes one uniform draw.
inline double sample_laplace(Rng& rng, double scale) {
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  double u = unif(rng);
  // sign(u) * ln(1 - 2|u|), u in (-0.5, 0.5)
  return u < 0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
}

}  // namespace privauction
