#include "pairloc/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "pairloc/combinatorics.hpp"
#include "pairloc/errors.hpp"

namespace pairloc {

namespace {

constexpr double kNormTolerance = 1e-10;

void check_normalized(double norm2) {
  if (!(std::abs(norm2 - 1.0) <= kNormTolerance)) {
    std::ostringstream msg;
    msg << "state is not normalized (norm^2 = " << norm2 << ")";
    throw InvalidDomain(msg.str());
  }
}

// Gathers the bits of `pattern` at `sites` into a compact integer.
BitState gather_bits(BitState pattern, std::span<const int> sites) {
  BitState out = 0;
  for (std::size_t t = 0; t < sites.size(); ++t) {
    out |= (pattern >> sites[t] & 1u) << t;
  }
  return out;
}

// Rank of a pattern among all patterns of equal popcount, increasing order.
std::size_t colex_rank(BitState pattern) {
  std::size_t rank = 0;
  int k = 0;
  while (pattern != 0) {
    const int p = std::countr_zero(pattern);
    rank += binomial(p, ++k);
    pattern &= pattern - 1;
  }
  return rank;
}

// Block layout of the bipartition (window | complement) for one window.
// Amplitudes of a sector state reshape into blocks labelled by the number of
// up spins inside the window.
struct BipartitionLayout {
  struct Entry {
    int block;
    std::size_t row;
    std::size_t col;
  };
  std::vector<Entry> entries;  // one per sector basis state
  std::vector<std::pair<std::size_t, std::size_t>> block_shapes;
};

BipartitionLayout make_layout(const SectorBasis& basis, std::span<const int> window) {
  const int n = basis.n_spins();
  std::vector<int> complement;
  std::vector<bool> inside(n, false);
  for (int s : window) inside[s] = true;
  for (int s = 0; s < n; ++s) {
    if (!inside[s]) complement.push_back(s);
  }
  const int len_a = static_cast<int>(window.size());
  const int len_b = static_cast<int>(complement.size());
  const int n_up = basis.n_up();

  BipartitionLayout layout;
  layout.block_shapes.resize(len_a + 1);
  for (int k = 0; k <= len_a; ++k) {
    layout.block_shapes[k] = {binomial(len_a, k), binomial(len_b, n_up - k)};
  }
  layout.entries.reserve(basis.size());
  for (BitState b : basis.states()) {
    const BitState a_bits = gather_bits(b, window);
    const BitState b_bits = gather_bits(b, complement);
    layout.entries.push_back({std::popcount(a_bits), colex_rank(a_bits), colex_rank(b_bits)});
  }
  return layout;
}

// Entanglement spectra of a sector state across one bipartition.
class BipartitionEntropy {
 public:
  explicit BipartitionEntropy(BipartitionLayout layout) : layout_(std::move(layout)) {
    const auto n_blocks = layout_.block_shapes.size();
    blocks_.resize(n_blocks);
    grams_.resize(n_blocks);
    solvers_.resize(n_blocks);
    for (std::size_t k = 0; k < n_blocks; ++k) {
      const auto [rows, cols] = layout_.block_shapes[k];
      blocks_[k].resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
  }

  double entropy(const Eigen::Ref<const Eigen::VectorXd>& state, double* clamped) {
    for (auto& block : blocks_) block.setZero();
    for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
      const auto& e = layout_.entries[static_cast<std::size_t>(idx)];
      blocks_[e.block](static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) =
          state(idx);
    }
    probabilities_.clear();
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& block = blocks_[k];
      if (block.size() == 0) continue;
      auto& gram = grams_[k];
      if (block.rows() <= block.cols()) {
        gram.noalias() = block * block.transpose();
      } else {
        gram.noalias() = block.transpose() * block;
      }
      if (gram.rows() == 1) {
        probabilities_.push_back(gram(0, 0));
        continue;
      }
      solvers_[k].compute(gram, Eigen::EigenvaluesOnly);
      const auto& ev = solvers_[k].eigenvalues();
      probabilities_.insert(probabilities_.end(), ev.data(), ev.data() + ev.size());
    }
    return entropy_bits(probabilities_, clamped);
  }

 private:
  BipartitionLayout layout_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::MatrixXd> grams_;
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers_;
  std::vector<double> probabilities_;
};

}  // namespace

double mean_level_spacing_ratio(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < 3) throw InvalidDomain("level spacing ratio needs at least 3 levels");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n + 2 < eigenvalues.size(); ++n) {
    const double lower = eigenvalues[n + 1] - eigenvalues[n];
    const double upper = eigenvalues[n + 2] - eigenvalues[n + 1];
    if (lower < 0.0 || upper < 0.0) throw InvalidDomain("eigenvalues must be sorted ascending");
    if (lower == 0.0 && upper == 0.0) continue;
    sum += std::min(lower, upper) / std::max(lower, upper);
    ++count;
  }
  if (count == 0) throw InvalidDomain("spectrum is fully degenerate");
  return sum / static_cast<double>(count);
}

SparseMatrix local_operator_matrix(LocalOperator kind, const SectorBasis& basis) {
  if (basis.n_spins() < 2) throw InvalidDomain("local operators need at least two spins");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(basis.size());
  for (Eigen::Index k = 0; k < dim; ++k) {
    const BitState b = basis.state(static_cast<std::size_t>(k));
    const bool up0 = b & 1u;
    const bool up1 = b >> 1 & 1u;
    switch (kind) {
      case LocalOperator::V1:
        triplets.emplace_back(k, k, up0 ? 1.0 : -1.0);
        break;
      case LocalOperator::V2:
        triplets.emplace_back(k, k, up0 == up1 ? 1.0 : -1.0);
        break;
      case LocalOperator::V3:
        if (up0 != up1) {
          const auto other = basis.index_of(b ^ 3u);
          triplets.emplace_back(static_cast<Eigen::Index>(*other), k, 1.0);
        }
        break;
    }
  }
  SparseMatrix op(dim, dim);
  op.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

ThoulessResult mean_thouless_parameter(const SpectrumResult& spectrum, const SparseMatrix& op,
                                       double floor) {
  const auto dim = static_cast<Eigen::Index>(spectrum.size());
  if (dim < 2) throw InvalidDomain("Thouless parameter needs at least 2 levels");
  if (op.rows() != dim || op.cols() != dim) throw InvalidDomain("operator dimension mismatch");
  const auto& vecs = spectrum.eigenvectors;
  const auto& energies = spectrum.eigenvalues;

  ThoulessResult result;
  Eigen::VectorXd v_next = op * vecs.col(0);
  double shifted_prev = energies(0) + vecs.col(0).dot(v_next);
  double sum = 0.0;
  for (Eigen::Index n = 0; n + 1 < dim; ++n) {
    // v_next holds V|n>; V is symmetric so <n|V|n+1> = <n+1|V|n>.
    const double element = std::abs(vecs.col(n + 1).dot(v_next));
    v_next = op * vecs.col(n + 1);
    const double shifted = energies(n + 1) + vecs.col(n + 1).dot(v_next);
    const double gap = std::abs(shifted - shifted_prev);
    shifted_prev = shifted;
    if (element < floor || gap < floor) ++result.floored;
    sum += std::log(std::max(element, floor)) - std::log(std::max(gap, floor));
  }
  result.mean = sum / static_cast<double>(dim - 1);
  return result;
}

Eigen::MatrixXd reduced_density_matrix(const Eigen::Ref<const Eigen::VectorXd>& state,
                                       const SectorBasis& basis, std::span<const int> subsystem) {
  const int n = basis.n_spins();
  if (state.size() != static_cast<Eigen::Index>(basis.size())) {
    throw InvalidDomain("state dimension does not match the basis");
  }
  std::vector<bool> inside(n, false);
  for (int s : subsystem) {
    if (s < 0 || s >= n) throw InvalidDomain("subsystem site out of range");
    if (inside[s]) throw InvalidDomain("subsystem sites must be distinct");
    inside[s] = true;
  }
  check_normalized(state.squaredNorm());
  std::vector<int> complement;
  for (int s = 0; s < n; ++s) {
    if (!inside[s]) complement.push_back(s);
  }

  // Group amplitudes by the configuration of the traced-out spins.
  std::vector<std::tuple<BitState, BitState, double>> entries;
  entries.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const BitState b = basis.state(k);
    entries.emplace_back(gather_bits(b, complement), gather_bits(b, subsystem), state(k));
  }
  std::sort(entries.begin(), entries.end());

  const auto dim = Eigen::Index{1} << subsystem.size();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t lo = 0; lo < entries.size();) {
    std::size_t hi = lo;
    while (hi < entries.size() && std::get<0>(entries[hi]) == std::get<0>(entries[lo])) ++hi;
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t q = lo; q < hi; ++q) {
        rho(std::get<1>(entries[p]), std::get<1>(entries[q])) +=
            std::get<2>(entries[p]) * std::get<2>(entries[q]);
      }
    }
    lo = hi;
  }
  return rho;
}

double entropy_bits(std::span<const double> probabilities, double* clamped) {
  double entropy = 0.0;
  for (double p : probabilities) {
    if (p < 0.0 && clamped != nullptr) *clamped -= p;
    if (p > kEntropyCutoff) entropy -= p * std::log2(p);
  }
  return entropy;
}

double entanglement_entropy(const Eigen::MatrixXd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidDomain("density matrix must be square");
  const double trace = rho.trace();
  if (!(std::abs(trace - 1.0) <= 1e-6)) {
    std::ostringstream msg;
    msg << "density matrix trace " << trace << " deviates from 1";
    throw InvalidDomain(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev.minCoeff() < -1e-10) throw InvalidDomain("density matrix is not positive semidefinite");
  return entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

std::vector<int> cyclic_window(int n_spins, int start, int length) {
  std::vector<int> sites(length);
  for (int t = 0; t < length; ++t) sites[t] = (start + t) % n_spins;
  return sites;
}

HalfChainEntropy mean_half_chain_entropy(const SpectrumResult& spectrum, const SectorBasis& basis) {
  const int n = basis.n_spins();
  if (n < 4) throw InvalidDomain("half-chain entropy needs at least 4 spins");
  if (spectrum.eigenvectors.rows() != static_cast<Eigen::Index>(basis.size())) {
    throw InvalidDomain("spectrum does not match the basis");
  }
  const int half = n / 2;
  // For even N the window starting at s + N/2 is the complement of the one at
  // s and carries identical entropy, so half of the windows suffice.
  const int distinct = n % 2 == 0 ? half : n;
  const double weight = n % 2 == 0 ? 2.0 : 1.0;

  HalfChainEntropy result;
  double total = 0.0;
  for (int start = 0; start < distinct; ++start) {
    const auto window = cyclic_window(n, start, half);
    BipartitionEntropy cut(make_layout(basis, window));
    double window_sum = 0.0;
    for (Eigen::Index k = 0; k < spectrum.eigenvectors.cols(); ++k) {
      window_sum += cut.entropy(spectrum.eigenvectors.col(k), &result.clamped_weight);
    }
    total += weight * window_sum;
  }
  result.mean = total / (static_cast<double>(n) * static_cast<double>(spectrum.size()));
  return result;
}

double participation_ratio(std::span<const double> overlaps) {
  double norm2 = 0.0;
  double fourth = 0.0;
  for (double c : overlaps) {
    const double c2 = c * c;
    norm2 += c2;
    fourth += c2 * c2;
  }
  check_normalized(norm2);
  return 1.0 / fourth;
}

double participation_ratio(const Eigen::Ref<const Eigen::VectorXd>& state,
                           const SparseMatrix& reference) {
  if (reference.rows() != state.size()) throw InvalidDomain("reference basis dimension mismatch");
  const Eigen::VectorXd overlaps = reference.transpose() * state;
  return participation_ratio(
      std::span<const double>(overlaps.data(), static_cast<std::size_t>(overlaps.size())));
}

double mean_participation_ratio(const SpectrumResult& spectrum) {
  const auto& vecs = spectrum.eigenvectors;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    sum += participation_ratio(
        std::span<const double>(vecs.col(k).data(), static_cast<std::size_t>(vecs.rows())));
  }
  return sum / static_cast<double>(vecs.cols());
}

double mean_participation_ratio(const SpectrumResult& spectrum, const SparseMatrix& reference) {
  const auto& vecs = spectrum.eigenvectors;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    sum += participation_ratio(vecs.col(k), reference);
  }
  return sum / static_cast<double>(vecs.cols());
}

}  // namespace pairloc
