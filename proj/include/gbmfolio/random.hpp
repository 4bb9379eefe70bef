#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gbmfolio {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `index` of `seed`. Depends only on the pair, so work
/// items can be generated in any order or on any thread.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Stable 64-bit FNV-1a hash, for deriving per-subject seeds from names.
constexpr std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// A seeded random stream: stream `index` of master seed `seed`.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace gbmfolio
