#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace xling::rng {

// SplitMix64 (Steele/Lea/Flood). Every draw is fully specified by the
// algorithm, so streams are identical on every platform and standard
// library, which std::shuffle / std::uniform_int_distribution are not.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Unbiased integer in [0, bound), bound > 0, via rejection sampling.
  std::uint64_t next_below(std::uint64_t bound);

  // Double in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t state_;
};

// Hierarchical stream derivation: each tag folds into the seed through
// FNV-1a plus one SplitMix64 scramble. derive(derive(s, "a"), "b") and
// derive(s, "ab") take different paths, so nested streams do not collide
// with flat ones.
std::uint64_t derive(std::uint64_t seed, std::string_view tag);
std::uint64_t derive(std::uint64_t seed, std::uint64_t value);

inline std::uint64_t derive(std::uint64_t seed, int value) {
  return derive(seed, static_cast<std::uint64_t>(value));
}

template <typename... Parts>
std::uint64_t derive_all(std::uint64_t seed, Parts&&... parts) {
  ((seed = derive(seed, std::forward<Parts>(parts))), ...);
  return seed;
}

// Fisher-Yates with SplitMix64 draws.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(gen.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// k distinct indices from [0, n), in draw order. Requires k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& gen);

// Uniformly random k-subset of [0, n), returned strictly increasing.
std::vector<std::size_t> sorted_sample(std::size_t n, std::size_t k, SplitMix64& gen);

}  // namespace xling::rng
