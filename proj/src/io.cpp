#include "pairloc/io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "pairloc/errors.hpp"

namespace pairloc {

namespace {

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidDomain("malformed number '" + std::string(text) + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(std::string_view text) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidDomain("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std_error", s.std_error}}; }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

nlohmann::json to_json(const PositionSample& sample) {
  return {{"n", sample.n_spins},
          {"w", sample.disorder_strength},
          {"l", sample.box_length},
          {"seed", sample.seed},
          {"positions", sample.positions}};
}

PositionSample position_sample_from_json(const nlohmann::json& j) {
  PositionSample s;
  try {
    s.n_spins = j.at("n").get<int>();
    s.disorder_strength = j.at("w").get<double>();
    s.box_length = j.at("l").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.positions = j.at("positions").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDomain(std::string("malformed position sample: ") + e.what());
  }
  if (static_cast<int>(s.positions.size()) != s.n_spins) {
    throw InvalidDomain("position count does not match n");
  }
  for (double x : s.positions) {
    if (!(x >= 0.0 && x < s.box_length)) throw InvalidDomain("position outside [0, l)");
  }
  if (!std::is_sorted(s.positions.begin(), s.positions.end())) {
    throw InvalidDomain("positions must be sorted ascending (index order is ring order)");
  }
  if (!satisfies_blockade(s.positions, s.box_length)) {
    throw InvalidDomain("positions violate the blockade condition");
  }
  return s;
}

nlohmann::json to_json(const PairSet& pairs) {
  auto out = nlohmann::json::array();
  for (const auto& p : pairs.pairs) {
    out.push_back({{"i", p.i}, {"j", p.j}, {"coupling", p.coupling}, {"span", p.span}});
  }
  return out;
}

nlohmann::json to_json(const ObservableRecord& r) {
  return {{"w", r.w},
          {"n", r.n_spins},
          {"seed", r.realization_seed},
          {"w_index", r.w_index},
          {"realization_index", r.realization_index},
          {"lsr", r.lsr},
          {"thouless_v1", r.thouless[0]},
          {"thouless_v2", r.thouless[1]},
          {"thouless_v3", r.thouless[2]},
          {"entropy", r.entropy},
          {"entropy_pred", r.entropy_pred},
          {"entropy_pred_exact", r.entropy_pred_exact},
          {"pr_z", r.pr_z},
          {"pr_pair", r.pr_pair},
          {"pr_z_pred", r.pr_z_pred},
          {"thouless_floored", r.thouless_floored},
          {"entropy_clamped", r.entropy_clamped}};
}

nlohmann::json to_json(const WPointStats& p) {
  return {{"w", p.w},
          {"count", p.count},
          {"skipped", p.skipped},
          {"lsr", summary_json(p.lsr)},
          {"thouless_v1", summary_json(p.thouless[0])},
          {"thouless_v2", summary_json(p.thouless[1])},
          {"thouless_v3", summary_json(p.thouless[2])},
          {"entropy", summary_json(p.entropy)},
          {"entropy_variance", p.entropy_variance},
          {"entropy_pred", summary_json(p.entropy_pred)},
          {"entropy_pred_exact", summary_json(p.entropy_pred_exact)},
          {"pr_z", summary_json(p.pr_z)},
          {"pr_pair", summary_json(p.pr_pair)},
          {"pr_z_pred", summary_json(p.pr_z_pred)},
          {"thouless_floored", p.thouless_floored},
          {"entropy_clamped", p.entropy_clamped}};
}

nlohmann::json ensemble_metadata(const EnsembleConfig& config, const EnsembleResult& result,
                                 bool w_grid_is_default) {
  nlohmann::json skips = nlohmann::json::array();
  for (const auto& p : result.stats.points) skips.push_back({{"w", p.w}, {"skipped", p.skipped}});
  return {{"version", kVersion},
          {"n", config.n_spins},
          {"w_values", config.w_values},
          {"w_grid_default", w_grid_is_default},
          {"alpha", config.alpha},
          {"delta", config.delta},
          {"c_alpha", config.c_alpha},
          {"realizations", config.n_realizations},
          {"seed", config.master_seed},
          {"sigma_factor", config.sampler.sigma_factor},
          {"max_attempts", config.sampler.max_attempts},
          {"sampler_switch_w", kSamplerSwitchW},
          {"skips", skips}};
}

void write_records_csv(std::ostream& out, const std::vector<ObservableRecord>& records) {
  out << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_double(r.w) << ',' << r.n_spins << ',' << r.realization_seed << ','
        << format_double(r.lsr) << ',' << format_double(r.thouless[0]) << ','
        << format_double(r.thouless[1]) << ',' << format_double(r.thouless[2]) << ','
        << format_double(r.entropy) << ',' << format_double(r.entropy_pred) << ','
        << format_double(r.pr_z) << ',' << format_double(r.pr_pair) << ','
        << format_double(r.pr_z_pred) << '\n';
  }
}

std::vector<ObservableRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kRecordCsvHeader) {
    throw InvalidDomain("unexpected CSV header; expected: " + std::string(kRecordCsvHeader));
  }
  std::vector<ObservableRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto f = split(text, ',');
    if (f.size() != 12) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 12 fields, got " << f.size();
      throw InvalidDomain(msg.str());
    }
    ObservableRecord r;
    r.w = parse_double(f[0]);
    r.n_spins = parse_int<int>(f[1]);
    r.realization_seed = parse_int<std::uint64_t>(f[2]);
    r.lsr = parse_double(f[3]);
    r.thouless = {parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
    r.entropy = parse_double(f[7]);
    r.entropy_pred = parse_double(f[8]);
    r.pr_z = parse_double(f[9]);
    r.pr_pair = parse_double(f[10]);
    r.pr_z_pred = parse_double(f[11]);
    records.push_back(r);
  }
  return records;
}

void write_summary_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "n,w,count,skipped,lsr,lsr_err,thouless_v1,thouless_v1_err,thouless_v2,thouless_v2_err,"
         "thouless_v3,thouless_v3_err,entropy,entropy_err,entropy_var,entropy_pred,"
         "entropy_pred_exact,pr_z,pr_z_err,pr_pair,pr_pair_err,pr_z_pred\n";
  for (const auto& p : stats.points) {
    out << stats.n_spins << ',' << format_double(p.w) << ',' << p.count << ',' << p.skipped;
    for (const Summary* s : {&p.lsr, &p.thouless[0], &p.thouless[1], &p.thouless[2], &p.entropy}) {
      out << ',' << format_double(s->mean) << ',' << format_double(s->std_error);
    }
    out << ',' << format_double(p.entropy_variance) << ',' << format_double(p.entropy_pred.mean)
        << ',' << format_double(p.entropy_pred_exact.mean);
    for (const Summary* s : {&p.pr_z, &p.pr_pair}) {
      out << ',' << format_double(s->mean) << ',' << format_double(s->std_error);
    }
    out << ',' << format_double(p.pr_z_pred.mean) << '\n';
  }
}

}  // namespace pairloc
