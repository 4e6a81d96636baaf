#include "pairloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pairloc/errors.hpp"

namespace pairloc {

namespace {

void check_arguments(int n_spins, double w) {
  if (n_spins < 2) throw InvalidDomain("need at least two spins");
  if (!(w >= 0.5)) {
    std::ostringstream msg;
    msg << "disorder strength W=" << w << " below the ordered limit 0.5";
    throw InvalidDomain(msg.str());
  }
}

// Reduce into [0, L). Guards the x == L rounding edge.
double wrap(double x, double L) {
  double y = x - L * std::floor(x / L);
  if (y >= L) y -= L;
  if (y < 0.0) y = 0.0;
  return y;
}

// Minimum cyclic gap of sorted coordinates on a ring of length L.
double min_sorted_gap(std::span<const double> sorted, double L) {
  double gap = L - (sorted.back() - sorted.front());
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    gap = std::min(gap, sorted[k] - sorted[k - 1]);
  }
  return gap;
}

[[noreturn]] void throw_budget(const char* sampler, int n, double w, std::uint64_t attempts) {
  std::ostringstream msg;
  msg << sampler << " sampler exhausted " << attempts << " attempts (N=" << n << ", W=" << w
      << ", density=" << 1.0 / (2.0 * w) << ")";
  throw SamplingFailure(msg.str(), attempts);
}

PositionSample make_sample(std::vector<double> positions, double L, int n, double w,
                           std::uint64_t seed) {
  PositionSample sample;
  sample.positions = std::move(positions);
  sample.box_length = L;
  sample.n_spins = n;
  sample.disorder_strength = w;
  sample.seed = seed;
  return sample;
}

}  // namespace

double box_length(int n_spins, double w) { return 2.0 * w * n_spins; }

double min_image_distance(double xi, double xj, double L) {
  if (!(L > 0.0)) throw InvalidDomain("box length must be positive");
  const double d = std::abs(xi - xj);
  return std::min(d, L - d);
}

double min_pair_distance(std::span<const double> positions, double L) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      best = std::min(best, min_image_distance(positions[i], positions[j], L));
    }
  }
  return best;
}

bool satisfies_blockade(std::span<const double> positions, double L) {
  if (positions.size() < 2) return true;
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  return min_sorted_gap(sorted, L) >= 1.0;
}

PositionSample sample_positions_naive(int n_spins, double w, RandomStream& rng,
                                      std::uint64_t max_attempts) {
  check_arguments(n_spins, w);
  const double L = box_length(n_spins, w);
  std::vector<double> x(n_spins);
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (auto& xi : x) xi = wrap(rng.uniform() * L, L);
    std::sort(x.begin(), x.end());
    if (min_sorted_gap(x, L) >= 1.0) return make_sample(std::move(x), L, n_spins, w, rng.seed());
  }
  throw_budget("naive", n_spins, w, max_attempts);
}

PositionSample sample_positions_shifted(int n_spins, double w, double sigma_factor,
                                        RandomStream& rng, std::uint64_t max_attempts) {
  check_arguments(n_spins, w);
  if (!(sigma_factor >= 0.0)) throw InvalidDomain("sigma_factor must be non-negative");
  const double L = box_length(n_spins, w);
  const double spacing = 2.0 * w;
  const double sigma = sigma_factor * (spacing - 1.0);
  std::vector<double> x(n_spins);
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (int i = 0; i < n_spins; ++i) {
      const double shift = sigma > 0.0 ? rng.uniform(-sigma, sigma) : 0.0;
      x[i] = wrap(i * spacing + shift, L);
    }
    std::sort(x.begin(), x.end());
    if (min_sorted_gap(x, L) >= 1.0) return make_sample(std::move(x), L, n_spins, w, rng.seed());
  }
  throw_budget("shifted-lattice", n_spins, w, max_attempts);
}

SamplerKind sampler_for(double w) {
  return w < kSamplerSwitchW ? SamplerKind::ShiftedLattice : SamplerKind::Naive;
}

PositionSample sample_positions(int n_spins, double w, RandomStream& rng,
                                const SamplerOptions& options) {
  check_arguments(n_spins, w);
  if (sampler_for(w) == SamplerKind::ShiftedLattice) {
    return sample_positions_shifted(n_spins, w, options.sigma_factor, rng, options.max_attempts);
  }
  return sample_positions_naive(n_spins, w, rng, options.max_attempts);
}

CouplingMatrix coupling_matrix(const PositionSample& sample, double alpha, double c_alpha) {
  if (!(alpha > 0.0)) throw InvalidDomain("interaction exponent must be positive");
  const int n = static_cast<int>(sample.positions.size());
  CouplingMatrix out;
  out.alpha = alpha;
  out.c_alpha = c_alpha;
  out.J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = min_image_distance(sample.positions[i], sample.positions[j], sample.box_length);
      if (d <= 0.0) throw InvalidDomain("coincident positions");
      const double value = c_alpha / std::pow(d, alpha);
      out.J(i, j) = value;
      out.J(j, i) = value;
    }
  }
  return out;
}

}  // namespace pairloc
