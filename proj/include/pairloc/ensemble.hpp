#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairloc/geometry.hpp"

namespace pairloc {

inline constexpr double kDefaultAlpha = 6.0;
inline constexpr double kDefaultDelta = -0.73;
inline constexpr int kDefaultRealizations = 2000;
inline constexpr int kDefaultPeakWindow = 5;
/// Largest tolerated fraction of failed realizations at one disorder strength.
inline constexpr double kMaxFailureFraction = 0.01;

/// `steps` log-spaced points from w_min to w_max inclusive.
std::vector<double> log_spaced(double w_min, double w_max, int steps);

/// 21 log-spaced points in [0.5, 3].
std::vector<double> default_w_grid();

struct EnsembleConfig {
  int n_spins = 12;
  std::vector<double> w_values = default_w_grid();
  double alpha = kDefaultAlpha;
  double delta = kDefaultDelta;
  double c_alpha = 1.0;
  int n_realizations = kDefaultRealizations;
  std::uint64_t master_seed = 0;
  SamplerOptions sampler;
  /// 0 selects the hardware concurrency.
  int workers = 0;

  void validate() const;
};

/// Disorder- and spectrum-averaged diagnostics of one realization.
struct ObservableRecord {
  double w = 0.0;
  int n_spins = 0;
  std::uint64_t realization_seed = 0;
  std::size_t w_index = 0;
  std::size_t realization_index = 0;
  double lsr = 0.0;
  std::array<double, 3> thouless{};  // V1, V2, V3
  double entropy = 0.0;
  double entropy_pred = 0.0;
  double entropy_pred_exact = 0.0;
  double pr_z = 0.0;
  double pr_pair = 0.0;
  double pr_z_pred = 0.0;
  std::size_t thouless_floored = 0;
  double entropy_clamped = 0.0;
};

using SpectrumSink = std::function<void(const ObservableRecord&, const Eigen::VectorXd&)>;

/// One realization: positions -> couplings -> sector Hamiltonian -> spectrum
/// -> observables and pair-model predictions. Bit-reproducible from
/// (master_seed, w_index, index).
ObservableRecord run_realization(const EnsembleConfig& config, std::size_t w_index,
                                 std::size_t index, Eigen::VectorXd* eigenvalues = nullptr);

struct Summary {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(count); 0 when count == 1.
  double std_error = 0.0;
};

struct WPointStats {
  double w = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  Summary lsr;
  std::array<Summary, 3> thouless;
  Summary entropy;
  Summary entropy_pred;
  Summary entropy_pred_exact;
  Summary pr_z;
  Summary pr_pair;
  Summary pr_z_pred;
  /// Sample variance of the half-chain entropy across realizations.
  double entropy_variance = 0.0;
  std::size_t thouless_floored = 0;
  double entropy_clamped = 0.0;
};

struct EnsembleStats {
  int n_spins = 0;
  std::vector<WPointStats> points;
};

struct Failure {
  std::size_t w_index = 0;
  std::size_t realization_index = 0;
  std::string message;
};

struct EnsembleResult {
  std::vector<ObservableRecord> records;  // sorted by (w_index, realization_index)
  std::vector<Failure> failures;
  EnsembleStats stats;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (w, realization) task on `config.workers` threads and reduces
/// in key order, so results do not depend on the worker count.
EnsembleResult run_ensemble(const EnsembleConfig& config, const SpectrumSink& sink = {},
                            const ProgressCallback& progress = {});

/// Per-w means, standard errors and entropy variance. `records` must be
/// grouped by w in the order of `w_values`.
EnsembleStats aggregate(int n_spins, std::span<const double> w_values,
                        std::span<const ObservableRecord> records,
                        std::span<const Failure> failures = {});

Summary summarize(std::span<const double> values);
double sample_variance(std::span<const double> values);

struct PeakFit {
  double w_star = 0.0;
  double uncertainty = 0.0;
  std::size_t first = 0;  // window bounds into the input, inclusive
  std::size_t last = 0;
};

/// Vertex of a least-squares parabola through `window` points around the
/// discrete maximum of `variances`.
PeakFit variance_peak_fit(std::span<const double> w_values, std::span<const double> variances,
                          int window = kDefaultPeakWindow);

}  // namespace pairloc
