#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace icprobe {

// SplitMix64 (Steele, Lea & Flood). Fixed constants make streams identical
// across languages and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t Next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 bits.
  double NextUnit() noexcept {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  // Index in [0, bound). Plain modulo reduction; bound must be > 0.
  std::uint64_t NextBelow(std::uint64_t bound) noexcept { return Next() % bound; }

 private:
  std::uint64_t state_;
};

// Durstenfeld shuffle: for i = n-1 .. 1, swap(i, NextBelow(i + 1)).
template <typename T>
void FisherYatesShuffle(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Independent stream seed for sub-task `index` of a master seed.
inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) noexcept {
  SplitMix64 mix(master ^ (index * 0xD1B54A32D192ED03ULL));
  return mix.Next();
}

std::uint64_t Fnv1a64(std::string_view data) noexcept;

std::string Sha256Hex(std::string_view data);

}  // namespace icprobe
