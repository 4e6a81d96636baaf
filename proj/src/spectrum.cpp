#include "pairloc/spectrum.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "pairloc/combinatorics.hpp"
#include "pairloc/errors.hpp"

namespace pairloc {

int default_n_up(int n_spins) {
  if (n_spins < 2) throw InvalidDomain("need at least two spins");
  return n_spins / 2 + 1;
}

SectorBasis::SectorBasis(int n_spins, int n_up, int max_spins)
    : n_spins_(n_spins), n_up_(n_up) {
  if (n_spins < 1) throw InvalidDomain("need at least one spin");
  if (n_spins > max_spins || n_spins > 31) {
    std::ostringstream msg;
    msg << "N=" << n_spins << " exceeds the configured maximum of " << max_spins << " spins";
    throw CapacityError(msg.str());
  }
  if (n_up < 0 || n_up > n_spins) throw InvalidDomain("n_up must lie in [0, N]");

  states_.reserve(binomial(n_spins, n_up));
  if (n_up == 0) {
    states_.push_back(0);
    return;
  }
  const BitState limit = BitState{1} << n_spins;
  // Gosper's hack enumerates equal-popcount patterns in increasing order.
  BitState v = (BitState{1} << n_up) - 1;
  while (v < limit) {
    states_.push_back(v);
    const BitState t = v | (v - 1);
    if (t == ~BitState{0}) break;
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
}

std::optional<std::size_t> SectorBasis::index_of(BitState pattern) const {
  if (n_spins_ < 32 && (pattern >> n_spins_) != 0) return std::nullopt;
  if (std::popcount(pattern) != n_up_) return std::nullopt;
  // Combinatorial number system: the rank in increasing order is the sum of
  // binomial(position, k) over the k-th set bit (k counted from 1).
  std::size_t rank = 0;
  int k = 0;
  for (int p = 0; p < n_spins_; ++p) {
    if (pattern >> p & 1u) rank += binomial(p, ++k);
  }
  return rank;
}

Eigen::MatrixXd build_hamiltonian(const CouplingMatrix& couplings, double delta,
                                  const SectorBasis& basis) {
  const int n = basis.n_spins();
  if (couplings.size() != n) {
    std::ostringstream msg;
    msg << "coupling matrix is " << couplings.size() << "x" << couplings.size()
        << " but the basis has " << n << " spins";
    throw InvalidDomain(msg.str());
  }
  const auto& J = couplings.J;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const BitState b = basis.state(static_cast<std::size_t>(col));
    double diagonal = 0.0;
    for (int i = 0; i < n; ++i) {
      const bool up_i = b >> i & 1u;
      for (int j = i + 1; j < n; ++j) {
        const bool up_j = b >> j & 1u;
        if (up_i == up_j) {
          diagonal += 0.25 * delta * J(i, j);
        } else {
          diagonal -= 0.25 * delta * J(i, j);
          const BitState flipped = b ^ ((BitState{1} << i) | (BitState{1} << j));
          const auto row = basis.index_of(flipped);
          h(static_cast<Eigen::Index>(*row), col) = 0.5 * J(i, j);
        }
      }
    }
    h(col, col) = diagonal;
  }
  return h;
}

SpectrumResult diagonalize(Eigen::MatrixXd h) {
  const Eigen::Index dim = h.rows();
  if (dim == 0 || h.cols() != dim) throw InvalidDomain("diagonalize needs a non-empty square matrix");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asymmetry = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (!(asymmetry <= 1e-12 * scale)) {
    std::ostringstream msg;
    msg << "matrix is not symmetric (max |H - H^T| = " << asymmetry << ")";
    throw InvalidDomain(msg.str());
  }

  const Eigen::MatrixXd original = h;
  SpectrumResult result;
  result.eigenvalues.resize(dim);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(dim),
                                         h.data(), static_cast<lapack_int>(dim),
                                         result.eigenvalues.data());
  if (info != 0) {
    std::ostringstream msg;
    msg << "dsyevd failed with info=" << info << " (dimension " << dim << ", max |H_ij| = " << scale
        << ")";
    throw NumericalFailure(msg.str());
  }
  result.eigenvectors = std::move(h);

  // Spot-check residuals of a few eigenpairs.
  const double norm = std::max(std::abs(result.eigenvalues(0)), std::abs(result.eigenvalues(dim - 1)));
  for (const Eigen::Index k : {Eigen::Index{0}, dim / 2, dim - 1}) {
    const auto v = result.eigenvectors.col(k);
    const double residual = (original * v - result.eigenvalues(k) * v).norm();
    if (!(residual <= 1e-10 * std::max(norm, 1e-300)) || !(std::abs(v.squaredNorm() - 1.0) <= 1e-10)) {
      std::ostringstream msg;
      msg << "eigensolver returned an inaccurate eigenpair (dimension " << dim << ", column " << k
          << ", residual " << residual << ", |H| " << norm << ")";
      throw NumericalFailure(msg.str());
    }
  }
  return result;
}

bool eigensolver_self_test() {
  constexpr Eigen::Index kDim = 256;
  Eigen::MatrixXd h(kDim, kDim);
  std::uint64_t state = 0x2545f4914f6cdd1dULL;
  for (Eigen::Index j = 0; j < kDim; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      h(i, j) = h(j, i) = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    }
  }
  Eigen::VectorXd w(kDim);
  Eigen::MatrixXd v = h;
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', kDim, v.data(), kDim, w.data()) != 0) return false;
  const double orth = (v.transpose() * v - Eigen::MatrixXd::Identity(kDim, kDim)).cwiseAbs().maxCoeff();
  const double residual = (h * v - v * w.asDiagonal()).cwiseAbs().maxCoeff();
  return orth < 1e-10 && residual < 1e-10;
}

}  // namespace pairloc
