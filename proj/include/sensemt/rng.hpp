#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace sensemt {

/// mt19937_64 has a fully specified output sequence, unlike the standard
/// distributions, so all sampling goes through uniform_below().
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return draw % bound;
}

/// Partial Fisher-Yates: afterwards items[0, count) is a uniform ordered
/// sample without replacement.
template <typename T>
void partial_shuffle(std::span<T> items, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count && i < items.size(); ++i) {
    const auto j = i + uniform_below(rng, items.size() - i);
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace sensemt
