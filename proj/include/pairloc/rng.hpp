#pragma once

#include <cstdint>
#include <random>

namespace pairloc {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for realization `index` at grid point `w_index` of a sweep.
/// Depends only on its arguments, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t w_index,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(master) ^ w_index) ^ index);
}

/// Seeded 64-bit Mersenne Twister with a platform-independent mapping to
/// doubles (std::uniform_real_distribution is implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pairloc
