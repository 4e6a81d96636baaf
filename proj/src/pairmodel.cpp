#include "pairloc/pairmodel.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "pairloc/combinatorics.hpp"
#include "pairloc/errors.hpp"
#include "pairloc/observables.hpp"

namespace pairloc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_sector(int n_pairs, int r) {
  if (n_pairs < 1) throw InvalidDomain("need at least one pair");
  if (std::abs(r) > n_pairs) {
    std::ostringstream msg;
    msg << "imbalance r=" << r << " exceeds the number of pairs " << n_pairs;
    throw InvalidDomain(msg.str());
  }
}

void check_partition(const PairSet& pairset, int n_spins) {
  if (pairset.n_spins != n_spins || 2 * pairset.n_pairs() != n_spins) {
    throw InvalidDomain("pair set does not match the number of spins");
  }
  std::vector<int> seen(n_spins, 0);
  for (const auto& p : pairset.pairs) {
    if (p.i < 0 || p.j < 0 || p.i >= n_spins || p.j >= n_spins || p.i == p.j) {
      throw InvalidDomain("pair indices out of range");
    }
    if (seen[p.i]++ || seen[p.j]++) throw InvalidDomain("pair set is not a partition");
  }
}

double intra_pair_energy(PairState s, double delta) {
  switch (s) {
    case PairState::Plus:
      return (2.0 - delta) / 4.0;
    case PairState::Minus:
      return (-2.0 - delta) / 4.0;
    case PairState::UpUp:
    case PairState::DownDown:
      return delta / 4.0;
  }
  return 0.0;
}

// Visits the (N_+, N_-, N_0) occupations of a sector.
template <typename F>
void for_each_occupation(int n_pairs, int r, F&& f) {
  for (int n_zero = 0; n_zero <= n_pairs; ++n_zero) {
    const int polarized = n_pairs - n_zero;
    if ((polarized + r) % 2 != 0) continue;
    const int n_plus = (polarized + r) / 2;
    const int n_minus = (polarized - r) / 2;
    if (n_plus < 0 || n_minus < 0) continue;
    f(n_plus, n_minus, n_zero);
  }
}

}  // namespace

int pair_magnetization(PairState state) {
  switch (state) {
    case PairState::UpUp:
      return 1;
    case PairState::DownDown:
      return -1;
    default:
      return 0;
  }
}

int magnetization_imbalance(int n_spins, int n_up) {
  if (n_spins % 2 != 0) throw InvalidDomain("pair model needs an even number of spins");
  return n_up - n_spins / 2;
}

PairSet greedy_pairing(const CouplingMatrix& couplings) {
  const int n = couplings.size();
  if (n < 2 || n % 2 != 0) {
    std::ostringstream msg;
    msg << "greedy pairing needs an even number of spins, got " << n;
    throw InvalidDomain(msg.str());
  }
  PairSet result;
  result.n_spins = n;
  std::vector<bool> paired(n, false);
  for (int round = 0; round < n / 2; ++round) {
    int best_i = -1;
    int best_j = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (paired[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!paired[j] && couplings.J(i, j) > best) {
          best = couplings.J(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    paired[best_i] = paired[best_j] = true;
    const int d = best_j - best_i;
    result.pairs.push_back({best_i, best_j, best, std::min(d, n - d)});
  }
  return result;
}

std::vector<PairBasisState> pair_basis_states(int n_pairs, int r) {
  check_sector(n_pairs, r);
  if (n_pairs > 15) throw CapacityError("too many pairs to enumerate");
  std::vector<PairBasisState> out;
  out.reserve(sector_count(n_pairs, r));
  const std::uint64_t total = std::uint64_t{1} << (2 * n_pairs);
  PairBasisState state(n_pairs);
  for (std::uint64_t code = 0; code < total; ++code) {
    int m = 0;
    for (int p = 0; p < n_pairs; ++p) {
      state[p] = static_cast<PairState>(code >> (2 * p) & 3u);
      m += pair_magnetization(state[p]);
    }
    if (m == r) out.push_back(state);
  }
  return out;
}

double effective_energy(const PairSet& pairset, const CouplingMatrix& couplings, double delta,
                        std::span<const PairState> state) {
  const auto& J = couplings.J;
  const int n_pairs = pairset.n_pairs();
  if (static_cast<int>(state.size()) != n_pairs) throw InvalidDomain("state has wrong pair count");
  double energy = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    energy += intra_pair_energy(state[p], delta) * pairset.pairs[p].coupling;
  }
  for (int p = 0; p < n_pairs; ++p) {
    const double mp = 0.5 * pair_magnetization(state[p]);
    if (mp == 0.0) continue;
    const auto& a = pairset.pairs[p];
    for (int q = p + 1; q < n_pairs; ++q) {
      const double mq = 0.5 * pair_magnetization(state[q]);
      if (mq == 0.0) continue;
      const auto& b = pairset.pairs[q];
      const double ising = delta * (J(a.i, b.i) + J(a.j, b.i) + J(a.i, b.j) + J(a.j, b.j));
      energy += ising * mp * mq;
    }
  }
  return energy;
}

std::vector<double> effective_hamiltonian(const PairSet& pairset, const CouplingMatrix& couplings,
                                          double delta, std::span<const PairBasisState> states) {
  check_partition(pairset, couplings.size());
  std::vector<double> energies;
  energies.reserve(states.size());
  for (const auto& s : states) energies.push_back(effective_energy(pairset, couplings, delta, s));
  return energies;
}

PairBasis pair_basis_transform(const PairSet& pairset, const SectorBasis& basis) {
  check_partition(pairset, basis.n_spins());
  const int r = magnetization_imbalance(basis.n_spins(), basis.n_up());
  PairBasis out;
  out.states = pair_basis_states(pairset.n_pairs(), r);
  if (out.states.size() != basis.size()) {
    std::ostringstream msg;
    msg << "pair basis has " << out.states.size() << " states but the sector has " << basis.size();
    throw ConsistencyError(msg.str());
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::pair<BitState, double>> terms;
  std::vector<std::pair<BitState, double>> next;
  for (std::size_t col = 0; col < out.states.size(); ++col) {
    terms.assign(1, {BitState{0}, 1.0});
    for (int p = 0; p < pairset.n_pairs(); ++p) {
      const BitState bit_i = BitState{1} << pairset.pairs[p].i;
      const BitState bit_j = BitState{1} << pairset.pairs[p].j;
      const PairState s = out.states[col][p];
      if (s == PairState::UpUp) {
        for (auto& t : terms) t.first |= bit_i | bit_j;
      } else if (s != PairState::DownDown) {
        const double sign = s == PairState::Plus ? 1.0 : -1.0;
        next.clear();
        for (const auto& [pattern, amp] : terms) {
          next.emplace_back(pattern | bit_i, amp * kInvSqrt2);
          next.emplace_back(pattern | bit_j, sign * amp * kInvSqrt2);
        }
        terms.swap(next);
      }
    }
    for (const auto& [pattern, amp] : terms) {
      const auto row = basis.index_of(pattern);
      if (!row) throw ConsistencyError("pair-basis state leaves the magnetization sector");
      triplets.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), amp);
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  out.transform.resize(dim, dim);
  out.transform.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::uint64_t config_count(int n_pairs, int n_plus, int n_minus, int n_zero) {
  if (n_plus < 0 || n_minus < 0 || n_zero < 0 || n_plus + n_minus + n_zero != n_pairs) {
    throw InvalidDomain("occupations must be non-negative and sum to the number of pairs");
  }
  return binomial(n_pairs, n_zero) * binomial(n_pairs - n_zero, n_plus) * (std::uint64_t{1} << n_zero);
}

std::uint64_t sector_count(int n_pairs, int r) {
  check_sector(n_pairs, r);
  return binomial(2 * n_pairs, r + n_pairs);
}

std::uint64_t entangled_count(int n_pairs, int r) {
  check_sector(n_pairs, r);
  return 2 * binomial(2 * n_pairs - 2, r + n_pairs - 1);
}

double mean_cut_entropy(int n_pairs, int r) {
  check_sector(n_pairs, r);
  const double p = n_pairs;
  return 2.0 * (p * p - static_cast<double>(r) * r) / (4.0 * p * p - 2.0 * p);
}

double predicted_entropy(const PairSet& pairset, int r) {
  if (pairset.n_spins <= 0) throw InvalidDomain("empty pair set");
  int cut_bonds = 0;
  for (const auto& p : pairset.pairs) cut_bonds += p.span;
  return mean_cut_entropy(pairset.n_pairs(), r) * 2.0 * cut_bonds / pairset.n_spins;
}

double exact_separated_pair_entropy(const PairSet& pairset, int r) {
  const int n = pairset.n_spins;
  if (n <= 0) throw InvalidDomain("empty pair set");
  const int half = n / 2;
  long separated = 0;
  for (int start = 0; start < n; ++start) {
    std::vector<bool> inside(n, false);
    for (int s : cyclic_window(n, start, half)) inside[s] = true;
    for (const auto& p : pairset.pairs) separated += inside[p.i] != inside[p.j];
  }
  return mean_cut_entropy(pairset.n_pairs(), r) * static_cast<double>(separated) / n;
}

double predicted_pr_zbasis(int n_pairs, int r) {
  check_sector(n_pairs, r);
  double weighted = 0.0;
  for_each_occupation(n_pairs, r, [&](int n_plus, int n_minus, int n_zero) {
    weighted += std::ldexp(static_cast<double>(config_count(n_pairs, n_plus, n_minus, n_zero)), n_zero);
  });
  return weighted / static_cast<double>(sector_count(n_pairs, r));
}

}  // namespace pairloc
