#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pairloc/errors.hpp"
#include "pairloc/geometry.hpp"

using namespace pairloc;

namespace {

PositionSample manual_sample(std::vector<double> x, double L) {
  PositionSample s;
  s.n_spins = static_cast<int>(x.size());
  s.positions = std::move(x);
  s.box_length = L;
  s.disorder_strength = L / (2.0 * s.n_spins);
  return s;
}

}  // namespace

TEST_CASE("min_image_distance") {
  CHECK(min_image_distance(0.5, 9.5, 10.0) == 1.0);
  CHECK(min_image_distance(0.0, 3.0, 10.0) == 3.0);
  CHECK(min_image_distance(0.0, 5.0, 10.0) == 5.0);
  CHECK(min_image_distance(9.5, 0.5, 10.0) == 1.0);
  CHECK_THROWS_AS(min_image_distance(0.0, 1.0, 0.0), InvalidDomain);
  CHECK_THROWS_AS(min_image_distance(0.0, 1.0, -3.0), InvalidDomain);
}

TEST_CASE("box length follows L = 2WN") {
  CHECK(box_length(10, 1.0) == 20.0);
  RandomStream rng(3);
  const auto s = sample_positions_naive(10, 1.0, rng);
  CHECK(s.box_length == 20.0);
  CHECK(s.n_spins == 10);
  CHECK(s.disorder_strength == 1.0);
}

TEST_CASE("naive sampler: two spins") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed);
    const auto s = sample_positions_naive(2, 5.0, rng);
    CHECK(s.box_length == 20.0);
    REQUIRE(s.positions.size() == 2);
    CHECK(min_image_distance(s.positions[0], s.positions[1], s.box_length) >= 1.0);
    CHECK(s.seed == seed);
  }
}

TEST_CASE("naive sampler fails beyond the jamming density") {
  // rho = 1/(2W) = 0.83 > 0.748
  RandomStream rng(11);
  try {
    sample_positions_naive(40, 0.6, rng, 20000);
    FAIL("expected a sampling failure");
  } catch (const SamplingFailure& e) {
    CHECK(e.attempts() == 20000);
  }
}

TEST_CASE("naive sampler acceptance matches (1 - rho)^(N-1)") {
  // One attempt per stream: the success frequency is the acceptance probability.
  const int trials = 6000;
  for (const auto& [n, w] : {std::pair{4, 1.0}, std::pair{6, 1.5}, std::pair{3, 0.8}}) {
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
      RandomStream rng(1000 + t);
      try {
        sample_positions_naive(n, w, rng, 1);
        ++accepted;
      } catch (const SamplingFailure&) {
      }
    }
    const double p = std::pow(1.0 - 1.0 / (2.0 * w), n - 1);
    const double se = std::sqrt(p * (1.0 - p) / trials);
    CHECK(std::abs(accepted / double(trials) - p) < 4.0 * se);
  }
}

TEST_CASE("naive acceptance collapses with N just below the jamming density") {
  // rho = 0.714: small rings pass quickly, long ones exhaust a modest budget
  RandomStream a(5);
  CHECK_NOTHROW(sample_positions_naive(4, 0.7, a, 1000));
  RandomStream b(5);
  CHECK_THROWS_AS(sample_positions_naive(40, 0.7, b, 1000), SamplingFailure);
}

TEST_CASE("naive sampler accepts at rho <= 0.5 for N <= 12") {
  for (int n = 2; n <= 12; ++n) {
    RandomStream rng(77 + n);
    const auto s = sample_positions_naive(n, 1.0, rng);
    CHECK(min_pair_distance(s.positions, s.box_length) >= 1.0);
  }
}

TEST_CASE("shifted sampler at W = 0.5 is the exact lattice") {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    RandomStream rng(seed);
    const auto s = sample_positions_shifted(8, 0.5, 1.5, rng);
    CHECK(s.box_length == 8.0);
    for (int i = 0; i < 8; ++i) CHECK(s.positions[i] == double(i));
  }
}

TEST_CASE("shifted sampler jitter stays within sigma") {
  // sigma = 1.5 * (2W - 1) = 0.3 at W = 0.6; lattice spacing 1.2
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomStream rng(seed);
    const auto s = sample_positions_shifted(4, 0.6, 1.5, rng);
    const double L = s.box_length;
    for (double x : s.positions) {
      double best = L;
      for (int i = 0; i < 4; ++i) best = std::min(best, min_image_distance(x, i * 1.2, L));
      CHECK(best <= 0.3 + 1e-12);
    }
    CHECK(satisfies_blockade(s.positions, L));
  }
}

TEST_CASE("shifted sampler honours the blockade") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed);
    const auto s = sample_positions_shifted(10, 0.9, 1.5, rng);
    CHECK(min_pair_distance(s.positions, s.box_length) >= 1.0);
    CHECK(std::is_sorted(s.positions.begin(), s.positions.end()));
    for (double x : s.positions) {
      CHECK(x >= 0.0);
      CHECK(x < s.box_length);
    }
  }
}

TEST_CASE("sample_positions dispatch") {
  CHECK(sampler_for(0.7) == SamplerKind::ShiftedLattice);
  CHECK(sampler_for(0.999) == SamplerKind::ShiftedLattice);
  CHECK(sampler_for(1.0) == SamplerKind::Naive);
  CHECK(sampler_for(1.5) == SamplerKind::Naive);

  // The dispatcher consumes the stream exactly like the chosen sampler.
  RandomStream a(21), b(21);
  const auto s1 = sample_positions(12, 0.7, a);
  const auto s2 = sample_positions_shifted(12, 0.7, kDefaultSigmaFactor, b);
  CHECK(s1.positions == s2.positions);
  RandomStream c(22), d(22);
  CHECK(sample_positions(12, 1.5, c).positions == sample_positions_naive(12, 1.5, d).positions);

  RandomStream e(1), f(2);
  CHECK(sample_positions(12, 0.5, e).positions == sample_positions(12, 0.5, f).positions);
}

TEST_CASE("samplers reject invalid arguments") {
  RandomStream rng(0);
  CHECK_THROWS_AS(sample_positions(12, 0.4, rng), InvalidDomain);
  CHECK_THROWS_AS(sample_positions(1, 1.0, rng), InvalidDomain);
  CHECK_THROWS_AS(sample_positions_shifted(4, 0.6, -1.0, rng), InvalidDomain);
}

TEST_CASE("same seed gives a bit-identical sample") {
  for (double w : {0.55, 0.8, 1.0, 2.5}) {
    RandomStream a(123), b(123);
    const auto s1 = sample_positions(12, w, a);
    const auto s2 = sample_positions(12, w, b);
    CHECK(s1.positions == s2.positions);
    CHECK(s1.box_length == s2.box_length);
  }
}

TEST_CASE("coupling_matrix") {
  SUBCASE("unit distance") {
    const auto J = coupling_matrix(manual_sample({0.0, 1.0}, 10.0), 6.0, 1.0);
    CHECK(J.J(0, 1) == 1.0);
  }
  SUBCASE("power law") {
    const auto J = coupling_matrix(manual_sample({0.0, 2.0}, 10.0), 6.0, 1.0);
    CHECK(J.J(0, 1) == 0.015625);
  }
  SUBCASE("periodic image") {
    const auto J = coupling_matrix(manual_sample({0.0, 9.0}, 10.0), 6.0, 1.0);
    CHECK(J.J(0, 1) == 1.0);
  }
  SUBCASE("coefficient scales") {
    const auto J = coupling_matrix(manual_sample({0.0, 2.0}, 10.0), 3.0, 4.0);
    CHECK(J.J(1, 0) == 0.5);
  }
  SUBCASE("coincident positions") {
    CHECK_THROWS_AS(coupling_matrix(manual_sample({1.0, 1.0}, 10.0), 6.0), InvalidDomain);
  }
  SUBCASE("non-positive exponent") {
    CHECK_THROWS_AS(coupling_matrix(manual_sample({0.0, 2.0}, 10.0), 0.0), InvalidDomain);
  }
}

TEST_CASE("coupling matrix invariants on random samples") {
  for (double w : {0.6, 0.9, 1.3, 3.0}) {
    RandomStream rng(static_cast<std::uint64_t>(w * 100));
    const auto s = sample_positions(14, w, rng);
    const auto c = coupling_matrix(s, 6.0);
    for (int i = 0; i < 14; ++i) {
      CHECK(c.J(i, i) == 0.0);
      for (int j = 0; j < 14; ++j) {
        CHECK(c.J(i, j) == c.J(j, i));
        if (i != j) {
          CHECK(c.J(i, j) > 0.0);
          CHECK(c.J(i, j) <= 1.0);
        }
      }
    }
  }
}
