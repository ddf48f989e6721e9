#include "xling/rng.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace xling::rng {

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  assert(bound > 0);
  // Rejection sampling over the largest multiple of bound below 2^64.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % bound;
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
}  // namespace

std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : tag) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= tag.size();
  SplitMix64 mix(seed ^ h);
  return mix.next();
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t h = kFnvOffset;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (i * 8)) & 0xffU;
    h *= kFnvPrime;
  }
  SplitMix64 mix(seed ^ h);
  return mix.next();
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& gen) {
  assert(k <= n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(gen.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::vector<std::size_t> sorted_sample(std::size_t n, std::size_t k, SplitMix64& gen) {
  auto picked = sample_without_replacement(n, k, gen);
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace xling::rng
