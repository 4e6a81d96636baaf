#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pairloc/geometry.hpp"

namespace pairloc {

using BitState = std::uint32_t;

inline constexpr int kMaxSpins = 20;

/// floor(N/2) + 1: the sector of smallest positive magnetization.
int default_n_up(int n_spins);

/// Fixed-magnetization computational basis. Bit k of a state is set iff spin
/// k points up; states are stored in increasing integer order.
class SectorBasis {
 public:
  SectorBasis(int n_spins, int n_up, int max_spins = kMaxSpins);

  int n_spins() const { return n_spins_; }
  int n_up() const { return n_up_; }
  std::size_t size() const { return states_.size(); }
  BitState state(std::size_t k) const { return states_[k]; }
  const std::vector<BitState>& states() const { return states_; }

  /// Ordinal of a pattern, or nullopt if it is not in the sector.
  std::optional<std::size_t> index_of(BitState pattern) const;

 private:
  int n_spins_;
  int n_up_;
  std::vector<BitState> states_;
};

inline SectorBasis sector_basis(int n_spins, int n_up, int max_spins = kMaxSpins) {
  return SectorBasis(n_spins, n_up, max_spins);
}

/// XXZ Hamiltonian with spin-1/2 operators, restricted to `basis`:
///   H = sum_{i<j} J_ij (S^x_i S^x_j + S^y_i S^y_j + delta S^z_i S^z_j).
Eigen::MatrixXd build_hamiltonian(const CouplingMatrix& couplings, double delta,
                                  const SectorBasis& basis);

/// Ascending eigenvalues; eigenvectors stored as columns.
struct SpectrumResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Full dense eigendecomposition of a real symmetric matrix (LAPACK dsyevd).
SpectrumResult diagonalize(Eigen::MatrixXd h);

/// Diagonalizes a fixed 256x256 matrix and checks orthonormality and
/// residuals of the result. False means the linked LAPACK is unusable.
bool eigensolver_self_test();

}  // namespace pairloc
