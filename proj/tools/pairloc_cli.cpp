#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "blas_guard.hpp"
#include "pairloc/ensemble.hpp"
#include "pairloc/errors.hpp"
#include "pairloc/geometry.hpp"
#include "pairloc/io.hpp"
#include "pairloc/pairmodel.hpp"
#include "pairloc/spectrum.hpp"

using namespace pairloc;

namespace {

struct RunOptions {
  int n = 12;
  double w_min = 0.5;
  double w_max = 3.0;
  int w_steps = 21;
  std::vector<double> w_list;
  double alpha = kDefaultAlpha;
  double delta = kDefaultDelta;
  int realizations = kDefaultRealizations;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
  std::string summary;
  bool dump_spectra = false;
  int workers = 0;
  double sigma_factor = kDefaultSigmaFactor;
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  bool progress = false;
};

// Writes to a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_run(const RunOptions& opt, bool grid_flags_given) {
  EnsembleConfig config;
  config.n_spins = opt.n;
  const bool default_grid = opt.w_list.empty() && !grid_flags_given;
  config.w_values = opt.w_list.empty() ? log_spaced(opt.w_min, opt.w_max, opt.w_steps) : opt.w_list;
  config.alpha = opt.alpha;
  config.delta = opt.delta;
  config.n_realizations = opt.realizations;
  config.master_seed = opt.seed;
  config.workers = opt.workers;
  config.sampler.sigma_factor = opt.sigma_factor;
  config.sampler.max_attempts = opt.max_attempts;

  std::unique_ptr<Output> spectra;
  SpectrumSink sink;
  if (opt.dump_spectra) {
    if (opt.out == "-") throw InvalidDomain("--dump-spectra needs --out to name a file");
    spectra = std::make_unique<Output>(opt.out + ".spectra.csv");
    spectra->stream() << "realization_index,level_index,energy\n";
    const auto per_w = static_cast<std::size_t>(config.n_realizations);
    sink = [&spectra, per_w](const ObservableRecord& rec, const Eigen::VectorXd& energies) {
      const std::size_t global = rec.w_index * per_w + rec.realization_index;
      auto& os = spectra->stream();
      for (Eigen::Index k = 0; k < energies.size(); ++k) {
        os << global << ',' << k << ',' << format_double(energies(k)) << '\n';
      }
    };
  }
  ProgressCallback progress;
  if (opt.progress) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }

  const EnsembleResult result = run_ensemble(config, sink, progress);
  Output out(opt.out);
  if (opt.format == "json") {
    nlohmann::json doc;
    doc["metadata"] = ensemble_metadata(config, result, default_grid);
    doc["records"] = nlohmann::json::array();
    for (const auto& r : result.records) doc["records"].push_back(to_json(r));
    doc["summary"] = nlohmann::json::array();
    for (const auto& p : result.stats.points) doc["summary"].push_back(to_json(p));
    out.stream() << doc.dump(2) << '\n';
  } else {
    write_records_csv(out.stream(), result.records);
  }
  if (!opt.summary.empty()) {
    Output summary(opt.summary);
    write_summary_csv(summary.stream(), result.stats);
  }
  for (const auto& f : result.failures) {
    std::cerr << "skipped w_index=" << f.w_index << " realization=" << f.realization_index << ": "
              << f.message << '\n';
  }
  return 0;
}

int cmd_predict(const std::string& path, double alpha, double c_alpha) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const PositionSample sample = position_sample_from_json(nlohmann::json::parse(in));
  const CouplingMatrix couplings = coupling_matrix(sample, alpha, c_alpha);
  const PairSet pairs = greedy_pairing(couplings);
  const int n_up = default_n_up(sample.n_spins);
  const int r = magnetization_imbalance(sample.n_spins, n_up);
  nlohmann::json doc = {
      {"n", sample.n_spins},
      {"w", sample.disorder_strength},
      {"alpha", alpha},
      {"n_up", n_up},
      {"r", r},
      {"pairs", to_json(pairs)},
      {"mean_cut_entropy", mean_cut_entropy(pairs.n_pairs(), r)},
      {"entropy_pred", predicted_entropy(pairs, r)},
      {"entropy_pred_exact", exact_separated_pair_entropy(pairs, r)},
      {"pr_z_pred", predicted_pr_zbasis(pairs.n_pairs(), r)},
  };
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int cmd_fit_peak(const std::string& path, int window) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const auto records = read_records_csv(in);
  // n -> w -> entropies
  std::map<int, std::map<double, std::vector<double>>> groups;
  for (const auto& r : records) groups[r.n_spins][r.w].push_back(r.entropy);
  std::cout << "n,w_star,uncertainty,window_lo,window_hi\n";
  int status = 0;
  for (const auto& [n, by_w] : groups) {
    std::vector<double> ws;
    std::vector<double> vars;
    for (const auto& [w, values] : by_w) {
      ws.push_back(w);
      vars.push_back(sample_variance(values));
    }
    try {
      const PeakFit fit = variance_peak_fit(ws, vars, window);
      std::cout << n << ',' << format_double(fit.w_star) << ',' << format_double(fit.uncertainty)
                << ',' << format_double(ws[fit.first]) << ',' << format_double(ws[fit.last])
                << '\n';
    } catch (const FitFailure& e) {
      std::cerr << "n=" << n << ": " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

int cmd_sample(int n, double w, std::uint64_t seed, double sigma_factor, std::uint64_t max_attempts) {
  RandomStream rng(seed);
  const PositionSample sample =
      sample_positions(n, w, rng, SamplerOptions{max_attempts, sigma_factor});
  std::cout << to_json(sample).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ensure_working_eigensolver(argv);
  CLI::App app{"Localization diagnostics for XXZ chains with blockade-induced positional disorder"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Disorder sweep: exact diagonalization and observables");
  run_cmd->add_option("--n", run.n, "Number of spins")->required();
  auto* w_min = run_cmd->add_option("--w-min", run.w_min, "Smallest disorder strength");
  auto* w_max = run_cmd->add_option("--w-max", run.w_max, "Largest disorder strength");
  auto* w_steps = run_cmd->add_option("--w-steps", run.w_steps, "Number of log-spaced grid points");
  run_cmd->add_option("--w-list", run.w_list, "Explicit disorder strengths (overrides the grid)")
      ->delimiter(',');
  run_cmd->add_option("--alpha", run.alpha, "Interaction exponent")->capture_default_str();
  run_cmd->add_option("--delta", run.delta, "XXZ anisotropy")->capture_default_str();
  run_cmd->add_option("--realizations", run.realizations, "Realizations per W")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output path ('-' for stdout)")->capture_default_str();
  run_cmd->add_option("--format", run.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  run_cmd->add_option("--summary", run.summary, "Also write per-W statistics as CSV");
  run_cmd->add_flag("--dump-spectra", run.dump_spectra, "Write eigenvalues to <out>.spectra.csv");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)")->capture_default_str();
  run_cmd->add_option("--sigma-factor", run.sigma_factor, "Shifted-lattice jitter factor")
      ->capture_default_str();
  run_cmd->add_option("--max-attempts", run.max_attempts, "Rejection-sampling budget")
      ->capture_default_str();
  run_cmd->add_flag("--progress", run.progress, "Report progress on stderr");

  std::string positions_path;
  double p_alpha = kDefaultAlpha;
  double p_c_alpha = 1.0;
  auto* predict_cmd = app.add_subcommand("predict", "Pair-model predictions for a stored sample");
  predict_cmd->add_option("--positions", positions_path, "PositionSample JSON")->required();
  predict_cmd->add_option("--alpha", p_alpha, "Interaction exponent")->capture_default_str();
  predict_cmd->add_option("--c-alpha", p_c_alpha, "Interaction coefficient")->capture_default_str();

  std::string fit_in;
  int fit_window = kDefaultPeakWindow;
  auto* fit_cmd = app.add_subcommand("fit-peak", "Locate the entropy-variance peak per N");
  fit_cmd->add_option("--in", fit_in, "Record CSV written by 'run'")->required();
  fit_cmd->add_option("--window", fit_window, "Points in the quadratic fit")->capture_default_str();

  int s_n = 12;
  double s_w = 1.0;
  std::uint64_t s_seed = 0;
  double s_sigma = kDefaultSigmaFactor;
  std::uint64_t s_attempts = kDefaultMaxAttempts;
  auto* sample_cmd = app.add_subcommand("sample", "Draw one blockaded position sample as JSON");
  sample_cmd->add_option("--n", s_n, "Number of spins")->required();
  sample_cmd->add_option("--w", s_w, "Disorder strength")->required();
  sample_cmd->add_option("--seed", s_seed, "Seed")->capture_default_str();
  sample_cmd->add_option("--sigma-factor", s_sigma, "Shifted-lattice jitter factor")
      ->capture_default_str();
  sample_cmd->add_option("--max-attempts", s_attempts, "Rejection-sampling budget")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const bool grid_flags = w_min->count() + w_max->count() + w_steps->count() > 0;
      return cmd_run(run, grid_flags);
    }
    if (*predict_cmd) return cmd_predict(positions_path, p_alpha, p_c_alpha);
    if (*fit_cmd) return cmd_fit_peak(fit_in, fit_window);
    if (*sample_cmd) return cmd_sample(s_n, s_w, s_seed, s_sigma, s_attempts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
