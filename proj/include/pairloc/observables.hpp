#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pairloc/spectrum.hpp"

namespace pairloc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Mean level spacing ratio of GOE random matrices, 4 - 2 sqrt(3).
inline constexpr double kGoeLsr = 0.53589838486224541;
/// Mean level spacing ratio of a Poisson spectrum, 2 ln 2 - 1.
inline constexpr double kPoissonLsr = 0.38629436111989061;

inline constexpr double kThoulessFloor = 1e-30;
inline constexpr double kEntropyCutoff = 1e-12;

/// Mean of min(g_{n+1}/g_n, g_n/g_{n+1}) over adjacent gap pairs. A zero gap
/// next to a finite one contributes 0; two zero gaps are skipped.
double mean_level_spacing_ratio(std::span<const double> eigenvalues);

inline double mean_level_spacing_ratio(const Eigen::VectorXd& eigenvalues) {
  return mean_level_spacing_ratio(std::span<const double>(eigenvalues.data(), eigenvalues.size()));
}

/// V1 = 2 S^z_0, V2 = 4 S^z_0 S^z_1, V3 = S^+_0 S^-_1 + h.c.
enum class LocalOperator { V1, V2, V3 };

inline constexpr LocalOperator kLocalOperators[] = {LocalOperator::V1, LocalOperator::V2,
                                                    LocalOperator::V3};

SparseMatrix local_operator_matrix(LocalOperator kind, const SectorBasis& basis);

struct ThoulessResult {
  double mean = 0.0;
  /// Adjacent pairs whose matrix element or perturbed gap hit the floor.
  std::size_t floored = 0;
};

/// Spectral mean of ln(|<n|V|n+1>| / |E'_{n+1} - E'_n|) with
/// E'_n = E_n + <n|V|n>, taken over adjacent pairs in unperturbed order.
ThoulessResult mean_thouless_parameter(const SpectrumResult& spectrum, const SparseMatrix& op,
                                       double floor = kThoulessFloor);

/// Partial trace of |state><state| onto `subsystem`. Local index bit k is set
/// iff spin subsystem[k] is up.
Eigen::MatrixXd reduced_density_matrix(const Eigen::Ref<const Eigen::VectorXd>& state,
                                       const SectorBasis& basis, std::span<const int> subsystem);

/// Von Neumann entropy in bits. Eigenvalues below kEntropyCutoff are
/// dropped; slightly negative ones are clamped to zero.
double entanglement_entropy(const Eigen::MatrixXd& rho);

/// Entropy in bits of a spectrum of a density matrix. Adds the weight of
/// clamped negative eigenvalues to `clamped`.
double entropy_bits(std::span<const double> probabilities, double* clamped = nullptr);

/// Sites of the cyclic window of `length` consecutive spins starting at `start`.
std::vector<int> cyclic_window(int n_spins, int start, int length);

struct HalfChainEntropy {
  double mean = 0.0;
  double clamped_weight = 0.0;
};

/// Entanglement entropy of floor(N/2) consecutive spins averaged over all N
/// cyclic windows and all eigenstates.
HalfChainEntropy mean_half_chain_entropy(const SpectrumResult& spectrum, const SectorBasis& basis);

/// (sum_b |c_b|^4)^-1 for the overlaps c_b with an orthonormal reference.
double participation_ratio(std::span<const double> overlaps);

/// PR of `state` against the reference basis whose vectors are the columns of
/// `reference`.
double participation_ratio(const Eigen::Ref<const Eigen::VectorXd>& state,
                           const SparseMatrix& reference);

/// Mean PR of all eigenstates against the computational basis.
double mean_participation_ratio(const SpectrumResult& spectrum);

/// Mean PR of all eigenstates against the columns of `reference`.
double mean_participation_ratio(const SpectrumResult& spectrum, const SparseMatrix& reference);

}  // namespace pairloc
