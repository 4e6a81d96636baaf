#include "pairloc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "pairloc/errors.hpp"
#include "pairloc/observables.hpp"
#include "pairloc/pairmodel.hpp"
#include "pairloc/rng.hpp"
#include "pairloc/spectrum.hpp"

// Present when LAPACK is backed by OpenBLAS; keeps each realization on one
// BLAS thread while realizations run concurrently.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace pairloc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::vector<double> log_spaced(double w_min, double w_max, int steps) {
  if (steps < 1) throw InvalidDomain("need at least one grid point");
  if (!(w_min > 0.0) || !(w_max >= w_min)) throw InvalidDomain("invalid w range");
  if (steps == 1) return {w_min};
  std::vector<double> grid(steps);
  const double lo = std::log(w_min);
  const double hi = std::log(w_max);
  for (int k = 0; k < steps; ++k) grid[k] = std::exp(lo + (hi - lo) * k / (steps - 1));
  grid.front() = w_min;
  grid.back() = w_max;
  return grid;
}

std::vector<double> default_w_grid() { return log_spaced(0.5, 3.0, 21); }

void EnsembleConfig::validate() const {
  if (n_spins < 4) throw InvalidDomain("ensemble runs need at least 4 spins");
  if (n_realizations < 1) throw InvalidDomain("need at least one realization");
  if (w_values.empty()) throw InvalidDomain("empty w grid");
  for (double w : w_values) {
    if (!(w >= 0.5)) throw InvalidDomain("all w values must be >= 0.5");
  }
  if (!(alpha > 0.0)) throw InvalidDomain("alpha must be positive");
}

ObservableRecord run_realization(const EnsembleConfig& config, std::size_t w_index,
                                 std::size_t index, Eigen::VectorXd* eigenvalues) {
  if (w_index >= config.w_values.size()) throw InvalidDomain("w index out of range");
  ObservableRecord rec;
  rec.w = config.w_values[w_index];
  rec.n_spins = config.n_spins;
  rec.w_index = w_index;
  rec.realization_index = index;
  rec.realization_seed = derive_seed(config.master_seed, w_index, index);

  RandomStream rng(rec.realization_seed);
  const PositionSample sample = sample_positions(config.n_spins, rec.w, rng, config.sampler);
  const CouplingMatrix couplings = coupling_matrix(sample, config.alpha, config.c_alpha);
  const SectorBasis basis(config.n_spins, default_n_up(config.n_spins));
  const SpectrumResult spectrum = diagonalize(build_hamiltonian(couplings, config.delta, basis));

  rec.lsr = mean_level_spacing_ratio(spectrum.eigenvalues);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto t = mean_thouless_parameter(spectrum, local_operator_matrix(kLocalOperators[k], basis));
    rec.thouless[k] = t.mean;
    rec.thouless_floored += t.floored;
  }
  const auto entropy = mean_half_chain_entropy(spectrum, basis);
  rec.entropy = entropy.mean;
  rec.entropy_clamped = entropy.clamped_weight;
  rec.pr_z = mean_participation_ratio(spectrum);

  if (config.n_spins % 2 == 0) {
    const PairSet pairs = greedy_pairing(couplings);
    const int r = magnetization_imbalance(config.n_spins, basis.n_up());
    const PairBasis pair_basis = pair_basis_transform(pairs, basis);
    rec.pr_pair = mean_participation_ratio(spectrum, pair_basis.transform);
    rec.entropy_pred = predicted_entropy(pairs, r);
    rec.entropy_pred_exact = exact_separated_pair_entropy(pairs, r);
    rec.pr_z_pred = predicted_pr_zbasis(pairs.n_pairs(), r);
  } else {
    rec.pr_pair = rec.entropy_pred = rec.entropy_pred_exact = rec.pr_z_pred = kNaN;
  }
  if (eigenvalues != nullptr) *eigenvalues = spectrum.eigenvalues;
  return rec;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    s.std_error = std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
  }
  return s;
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return sq / static_cast<double>(values.size() - 1);
}

EnsembleStats aggregate(int n_spins, std::span<const double> w_values,
                        std::span<const ObservableRecord> records,
                        std::span<const Failure> failures) {
  EnsembleStats stats;
  stats.n_spins = n_spins;
  std::vector<double> buffer;
  auto field = [&](std::span<const ObservableRecord> group, auto getter) {
    buffer.clear();
    for (const auto& r : group) buffer.push_back(getter(r));
    return summarize(buffer);
  };

  std::size_t begin = 0;
  for (std::size_t wi = 0; wi < w_values.size(); ++wi) {
    std::size_t end = begin;
    while (end < records.size() && records[end].w_index == wi) ++end;
    const auto group = records.subspan(begin, end - begin);
    begin = end;

    WPointStats p;
    p.w = w_values[wi];
    p.count = group.size();
    for (const auto& f : failures) p.skipped += f.w_index == wi;
    p.lsr = field(group, [](const auto& r) { return r.lsr; });
    for (std::size_t k = 0; k < 3; ++k) {
      p.thouless[k] = field(group, [k](const auto& r) { return r.thouless[k]; });
    }
    p.entropy = field(group, [](const auto& r) { return r.entropy; });
    p.entropy_variance = sample_variance(buffer);
    p.entropy_pred = field(group, [](const auto& r) { return r.entropy_pred; });
    p.entropy_pred_exact = field(group, [](const auto& r) { return r.entropy_pred_exact; });
    p.pr_z = field(group, [](const auto& r) { return r.pr_z; });
    p.pr_pair = field(group, [](const auto& r) { return r.pr_pair; });
    p.pr_z_pred = field(group, [](const auto& r) { return r.pr_z_pred; });
    for (const auto& r : group) {
      p.thouless_floored += r.thouless_floored;
      p.entropy_clamped += r.entropy_clamped;
    }
    stats.points.push_back(p);
  }
  if (begin != records.size()) throw InvalidDomain("records are not grouped by w index");
  return stats;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, const SpectrumSink& sink,
                            const ProgressCallback& progress) {
  config.validate();
  const std::size_t per_w = static_cast<std::size_t>(config.n_realizations);
  const std::size_t total = config.w_values.size() * per_w;
  const int workers = static_cast<int>(std::min<std::size_t>(resolve_workers(config.workers), total));
  if (workers > 1 && openblas_set_num_threads != nullptr) openblas_set_num_threads(1);

  struct Slot {
    std::optional<ObservableRecord> record;
    std::string error;
    Eigen::VectorXd eigenvalues;
  };
  std::vector<Slot> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      Slot& slot = slots[task];
      try {
        slot.record = run_realization(config, task / per_w, task % per_w,
                                      sink ? &slot.eigenvalues : nullptr);
      } catch (const SamplingFailure& e) {
        slot.error = e.what();
      } catch (const NumericalFailure& e) {
        slot.error = e.what();
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  EnsembleResult result;
  result.records.reserve(total);
  for (std::size_t task = 0; task < total; ++task) {
    auto& slot = slots[task];
    if (slot.record) {
      if (sink) sink(*slot.record, slot.eigenvalues);
      result.records.push_back(*slot.record);
    } else {
      result.failures.push_back({task / per_w, task % per_w, slot.error});
    }
  }

  for (std::size_t wi = 0; wi < config.w_values.size(); ++wi) {
    const auto failed = std::count_if(result.failures.begin(), result.failures.end(),
                                      [wi](const Failure& f) { return f.w_index == wi; });
    if (static_cast<double>(failed) > kMaxFailureFraction * static_cast<double>(per_w)) {
      const auto first = std::find_if(result.failures.begin(), result.failures.end(),
                                      [wi](const Failure& f) { return f.w_index == wi; });
      std::ostringstream msg;
      msg << failed << " of " << per_w << " realizations failed at W=" << config.w_values[wi]
          << " (N=" << config.n_spins << "); first error: " << first->message;
      throw Error(msg.str());
    }
  }
  result.stats = aggregate(config.n_spins, config.w_values, result.records, result.failures);
  return result;
}

PeakFit variance_peak_fit(std::span<const double> w_values, std::span<const double> variances,
                          int window) {
  if (w_values.size() != variances.size()) throw InvalidDomain("w and variance lengths differ");
  if (window < 3) throw InvalidDomain("fit window needs at least 3 points");
  const std::size_t n = w_values.size();
  if (n < 3) throw FitFailure("need at least 3 points for a quadratic fit");

  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(variances.begin(), variances.end()) - variances.begin());
  const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(window), n);
  const std::size_t half = width / 2;
  std::size_t first = peak > half ? peak - half : 0;
  if (first + width > n) first = n - width;
  const std::size_t last = first + width - 1;

  // Fit in coordinates centred on the discrete maximum.
  const double origin = w_values[peak];
  const auto m = static_cast<Eigen::Index>(width);
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = w_values[first + static_cast<std::size_t>(k)] - origin;
    design(k, 0) = 1.0;
    design(k, 1) = t;
    design(k, 2) = t * t;
    y(k) = variances[first + static_cast<std::size_t>(k)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw FitFailure("degenerate w values in fit window");
  const Eigen::Vector3d coef = qr.solve(y);
  const double b = coef(1);
  const double c = coef(2);
  if (!(c < 0.0)) throw FitFailure("fitted parabola does not open downward");

  PeakFit fit;
  fit.first = first;
  fit.last = last;
  fit.w_star = origin - b / (2.0 * c);
  const double lo = std::min(w_values[first], w_values[last]);
  const double hi = std::max(w_values[first], w_values[last]);
  if (fit.w_star < lo || fit.w_star > hi) {
    std::ostringstream msg;
    msg << "fitted vertex " << fit.w_star << " lies outside the window [" << lo << ", " << hi << "]";
    throw FitFailure(msg.str());
  }

  if (m > 3) {
    const double rss = (design * coef - y).squaredNorm();
    const Eigen::Matrix3d cov =
        (rss / static_cast<double>(m - 3)) * (design.transpose() * design).inverse();
    const Eigen::Vector3d grad(0.0, -1.0 / (2.0 * c), b / (2.0 * c * c));
    fit.uncertainty = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  }
  return fit;
}

}  // namespace pairloc
