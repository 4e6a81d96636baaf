#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "pairloc/combinatorics.hpp"
#include "pairloc/errors.hpp"
#include "pairloc/spectrum.hpp"

using namespace pairloc;

namespace {

CouplingMatrix two_spin(double j) {
  CouplingMatrix c;
  c.J = Eigen::MatrixXd::Zero(2, 2);
  c.J(0, 1) = c.J(1, 0) = j;
  return c;
}

CouplingMatrix random_couplings(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  CouplingMatrix c;
  c.J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) c.J(i, j) = c.J(j, i) = rng.uniform(0.01, 1.0);
  }
  return c;
}

void check_invariants(const Eigen::MatrixXd& h, const SpectrumResult& s) {
  const auto dim = h.rows();
  REQUIRE(s.eigenvalues.size() == dim);
  REQUIRE(s.eigenvectors.cols() == dim);
  for (Eigen::Index k = 1; k < dim; ++k) CHECK(s.eigenvalues(k - 1) <= s.eigenvalues(k));
  const double norm = h.operatorNorm();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto v = s.eigenvectors.col(k);
    CHECK((h * v - s.eigenvalues(k) * v).norm() <= 1e-10 * std::max(norm, 1.0));
  }
  const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <= 1e-10);
}

}  // namespace

TEST_CASE("default_n_up") {
  CHECK(default_n_up(16) == 9);
  CHECK(binomial(16, 9) == 11440);
  CHECK(default_n_up(4) == 3);
  CHECK(SectorBasis(4, default_n_up(4)).size() == 4);
  CHECK(default_n_up(2) == 2);
  const SectorBasis b(2, default_n_up(2));
  REQUIRE(b.size() == 1);
  CHECK(b.state(0) == 0b11u);
  CHECK(default_n_up(7) == 4);
  CHECK_THROWS_AS(default_n_up(1), InvalidDomain);
}

TEST_CASE("sector_basis enumeration") {
  const SectorBasis b(3, 2);
  CHECK(b.states() == std::vector<BitState>{0b011, 0b101, 0b110});
  CHECK(SectorBasis(4, 3).size() == 4);
  CHECK(SectorBasis(14, 8).size() == 3003);
  CHECK(SectorBasis(5, 0).states() == std::vector<BitState>{0});
  CHECK(SectorBasis(5, 5).states() == std::vector<BitState>{0b11111});
  CHECK_THROWS_AS(SectorBasis(21, 10), CapacityError);
  CHECK_THROWS_AS(SectorBasis(12, 6, 10), CapacityError);
  CHECK_THROWS_AS(SectorBasis(4, 5), InvalidDomain);
  CHECK_THROWS_AS(SectorBasis(4, -1), InvalidDomain);
}

TEST_CASE("sector basis invariants") {
  for (int n = 1; n <= 12; ++n) {
    for (int k = 0; k <= n; ++k) {
      const SectorBasis b(n, k);
      REQUIRE(b.size() == binomial(n, k));
      for (std::size_t s = 0; s < b.size(); ++s) {
        CHECK(std::popcount(b.state(s)) == k);
        if (s > 0) CHECK(b.state(s - 1) < b.state(s));
        CHECK(b.index_of(b.state(s)) == s);
      }
    }
  }
  const SectorBasis b(6, 3);
  CHECK_FALSE(b.index_of(0b000111u << 6).has_value());
  CHECK_FALSE(b.index_of(0b001111u).has_value());
  // Every in-sector pattern is found, by brute force over all patterns.
  std::size_t found = 0;
  for (BitState p = 0; p < 64; ++p) found += b.index_of(p).has_value();
  CHECK(found == b.size());
}

TEST_CASE("two-spin Hamiltonian") {
  const double j = 0.8, delta = -0.73;
  const auto h1 = build_hamiltonian(two_spin(j), delta, SectorBasis(2, 1));
  REQUIRE(h1.rows() == 2);
  CHECK(h1(0, 0) == doctest::Approx(-j * delta / 4).epsilon(1e-15));
  CHECK(h1(1, 1) == doctest::Approx(-j * delta / 4).epsilon(1e-15));
  CHECK(h1(0, 1) == j / 2);
  CHECK(h1(1, 0) == j / 2);
  const auto s = diagonalize(h1);
  CHECK(s.eigenvalues(0) == doctest::Approx(j * (-2 - delta) / 4).epsilon(1e-14));
  CHECK(s.eigenvalues(1) == doctest::Approx(j * (2 - delta) / 4).epsilon(1e-14));

  const auto h2 = build_hamiltonian(two_spin(j), delta, SectorBasis(2, 2));
  REQUIRE(h2.rows() == 1);
  CHECK(h2(0, 0) == doctest::Approx(j * delta / 4).epsilon(1e-15));
}

TEST_CASE("build_hamiltonian rejects a dimension mismatch") {
  CHECK_THROWS_AS(build_hamiltonian(two_spin(1.0), 0.5, SectorBasis(3, 1)), InvalidDomain);
}

TEST_CASE("sector Hamiltonian equals the projected full-space Hamiltonian") {
  for (int n = 2; n <= 8; ++n) {
    const auto c = random_couplings(n, 40 + n);
    const Eigen::MatrixXd full = oracle::full_hamiltonian(c, -0.73);
    for (int k = 0; k <= n; ++k) {
      const SectorBasis b(n, k);
      const Eigen::MatrixXd direct = build_hamiltonian(c, -0.73, b);
      const Eigen::MatrixXd projected = oracle::project(full, b);
      CHECK((direct - projected).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("trace matches the closed-form magnetization sum") {
  for (int n : {4, 7, 10}) {
    const auto c = random_couplings(n, 7 * n);
    double coupling_sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) coupling_sum += c.J(i, j);
    for (int k = 0; k <= n; ++k) {
      const SectorBasis b(n, k);
      const auto h = build_hamiltonian(c, 1.3, b);
      const double expected = 1.3 * coupling_sum * oracle::sector_zz_sum(n, k);
      CHECK(h.trace() == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("diagonalize: small cases") {
  const auto id = diagonalize(Eigen::MatrixXd::Identity(3, 3));
  for (int k = 0; k < 3; ++k) CHECK(id.eigenvalues(k) == doctest::Approx(1.0));
  check_invariants(Eigen::MatrixXd::Identity(3, 3), id);

  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(diagonalize(asym), InvalidDomain);
  CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd(0, 0)), InvalidDomain);
}

TEST_CASE("diagonalize: residual, orthonormality, trace") {
  for (int n : {6, 9, 12}) {
    const auto c = random_couplings(n, 100 + n);
    const SectorBasis b(n, default_n_up(n));
    const auto h = build_hamiltonian(c, -0.73, b);
    const auto s = diagonalize(h);
    check_invariants(h, s);
    const double scale = std::max(1.0, h.cwiseAbs().sum() / h.rows());
    CHECK(std::abs(s.eigenvalues.sum() - h.trace()) <= 1e-9 * scale * h.rows());
  }
}

TEST_CASE("eigensolver self-test passes") { CHECK(eigensolver_self_test()); }

TEST_CASE("spectrum is invariant under relabeling spins") {
  const int n = 8;
  const auto c = random_couplings(n, 5);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RandomStream rng(9);
  for (int k = n - 1; k > 0; --k) {
    std::swap(perm[k], perm[static_cast<int>(rng.uniform() * (k + 1))]);
  }
  CouplingMatrix d = c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.J(perm[i], perm[j]) = c.J(i, j);
  const SectorBasis b(n, default_n_up(n));
  const auto e1 = diagonalize(build_hamiltonian(c, -0.73, b)).eigenvalues;
  const auto e2 = diagonalize(build_hamiltonian(d, -0.73, b)).eigenvalues;
  CHECK((e1 - e2).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("four spins with one dominant pair: eigenvectors are pair products") {
  // J[1][2] at least 100 times every other coupling, and the weak pair (0,3)
  // at least 100 times the remaining couplings.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed);
    CouplingMatrix c;
    c.J = Eigen::MatrixXd::Zero(4, 4);
    c.J(1, 2) = c.J(2, 1) = rng.uniform(1.0, 2.0);
    c.J(0, 3) = c.J(3, 0) = 0.01;
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}}) {
      c.J(i, j) = c.J(j, i) = rng.uniform(0.0, 1e-4);
    }
    const SectorBasis b(4, default_n_up(4));
    const auto s = diagonalize(build_hamiltonian(c, -0.73, b));
    const std::vector<std::pair<int, int>> pairs{{1, 2}, {0, 3}};
    std::vector<Eigen::VectorXd> products;
    for (const auto& t : oracle::all_tuples(2)) {
      const Eigen::VectorXd full = oracle::pair_product_state(pairs, t, 4);
      Eigen::VectorXd sector(b.size());
      for (std::size_t k = 0; k < b.size(); ++k) sector(k) = full(b.state(k));
      if (sector.squaredNorm() > 0.5) products.push_back(sector);
    }
    REQUIRE(products.size() == b.size());
    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
      double best = 0.0;
      int hits = 0;
      for (const auto& p : products) {
        const double o = std::pow(p.dot(s.eigenvectors.col(k)), 2);
        best = std::max(best, o);
        hits += o > 0.99;
      }
      CHECK(best > 0.99);
      CHECK(hits == 1);
    }
  }
}
