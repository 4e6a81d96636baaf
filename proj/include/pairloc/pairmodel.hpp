#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "pairloc/geometry.hpp"
#include "pairloc/spectrum.hpp"

namespace pairloc {

struct Pair {
  int i = 0;  // i < j
  int j = 0;
  double coupling = 0.0;
  /// Cyclic index distance between i and j, in bonds.
  int span = 0;
};

/// Spins partitioned into pairs, in elimination order.
struct PairSet {
  std::vector<Pair> pairs;
  int n_spins = 0;

  int n_pairs() const { return static_cast<int>(pairs.size()); }
};

/// Eigenstates of a single pair: (|ud> + |du>)/sqrt2, (|ud> - |du>)/sqrt2,
/// |uu>, |dd>. The first spin of the ket is the lower index of the pair.
enum class PairState : std::uint8_t { Plus, Minus, UpUp, DownDown };

using PairBasisState = std::vector<PairState>;

/// +1 for UpUp, -1 for DownDown, 0 otherwise.
int pair_magnetization(PairState state);

/// N_+ - N_- of a sector: n_up - N/2. Requires even N.
int magnetization_imbalance(int n_spins, int n_up);

/// Strongest-coupling-first pairing of all spins (N even).
PairSet greedy_pairing(const CouplingMatrix& couplings);

/// Every pair-basis state with N_+ - N_- = r, in base-4 counting order with
/// pair 0 as the least significant digit.
std::vector<PairBasisState> pair_basis_states(int n_pairs, int r);

/// First-order energy of a pair-basis state: intra-pair energies plus the
/// Ising coupling between polarized pairs.
double effective_energy(const PairSet& pairset, const CouplingMatrix& couplings, double delta,
                        std::span<const PairState> state);

/// Diagonal of the effective Hamiltonian over `states`.
std::vector<double> effective_hamiltonian(const PairSet& pairset, const CouplingMatrix& couplings,
                                          double delta, std::span<const PairBasisState> states);

/// Sector pair basis and its expansion in the computational basis: column c
/// of `transform` holds the z-basis amplitudes of states[c].
struct PairBasis {
  std::vector<PairBasisState> states;
  Eigen::SparseMatrix<double> transform;
};

PairBasis pair_basis_transform(const PairSet& pairset, const SectorBasis& basis);

// Sector combinatorics for P pairs with imbalance r = N_+ - N_-.

std::uint64_t config_count(int n_pairs, int n_plus, int n_minus, int n_zero);
std::uint64_t sector_count(int n_pairs, int r);
std::uint64_t entangled_count(int n_pairs, int r);

/// Mean entropy in bits of one cut pair over a magnetization sector.
double mean_cut_entropy(int n_pairs, int r);

/// Mean half-chain entropy from cut-bond counting: each bond between paired
/// spins is cut twice among the N windows.
double predicted_entropy(const PairSet& pairset, int r);

/// Same prediction with exact window counting of separated pairs.
double exact_separated_pair_entropy(const PairSet& pairset, int r);

/// Sector mean of the z-basis PR of pair-basis states (2^{N_0} each).
double predicted_pr_zbasis(int n_pairs, int r);

}  // namespace pairloc
