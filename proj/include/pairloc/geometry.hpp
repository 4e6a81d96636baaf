#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pairloc/rng.hpp"

namespace pairloc {

/// Density of random sequential adsorption of unit intervals (Renyi).
inline constexpr double kJammingDensity = 0.7475979202534114;

inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;
inline constexpr double kDefaultSigmaFactor = 1.5;

/// Below this disorder strength the shifted-lattice sampler is used.
inline constexpr double kSamplerSwitchW = 1.0;

/// One disorder realization on a ring. Lengths are in units of the blockade
/// radius. Positions are sorted ascending, so index order is ring order.
struct PositionSample {
  std::vector<double> positions;
  double box_length = 0.0;
  int n_spins = 0;
  double disorder_strength = 0.0;
  std::uint64_t seed = 0;
};

struct CouplingMatrix {
  Eigen::MatrixXd J;
  double alpha = 6.0;
  double c_alpha = 1.0;

  int size() const { return static_cast<int>(J.rows()); }
};

enum class SamplerKind { ShiftedLattice, Naive };

struct SamplerOptions {
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  double sigma_factor = kDefaultSigmaFactor;
};

/// L = 2 W N.
double box_length(int n_spins, double w);

double min_image_distance(double xi, double xj, double box_length);

/// Smallest minimum-image distance over all pairs.
double min_pair_distance(std::span<const double> positions, double box_length);

bool satisfies_blockade(std::span<const double> positions, double box_length);

PositionSample sample_positions_naive(int n_spins, double w, RandomStream& rng,
                                      std::uint64_t max_attempts = kDefaultMaxAttempts);

PositionSample sample_positions_shifted(int n_spins, double w, double sigma_factor,
                                        RandomStream& rng,
                                        std::uint64_t max_attempts = kDefaultMaxAttempts);

SamplerKind sampler_for(double w);

/// Shifted-lattice sampler for W < 1, naive rejection sampler otherwise.
PositionSample sample_positions(int n_spins, double w, RandomStream& rng,
                                const SamplerOptions& options = {});

/// J_ij = c_alpha / d_ij^alpha with d_ij the minimum-image distance.
CouplingMatrix coupling_matrix(const PositionSample& sample, double alpha,
                               double c_alpha = 1.0);

}  // namespace pairloc
