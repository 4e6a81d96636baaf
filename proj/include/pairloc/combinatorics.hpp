#pragma once

#include <cstdint>

namespace pairloc {

/// n choose k; zero when k < 0 or k > n. Exact for n <= 62.
constexpr std::uint64_t binomial(int n, int k) noexcept {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i at every step
    result = result / i * (n - k + i) + result % i * (n - k + i) / i;
  }
  return result;
}

}  // namespace pairloc
