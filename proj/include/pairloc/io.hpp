#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pairloc/ensemble.hpp"
#include "pairloc/geometry.hpp"
#include "pairloc/pairmodel.hpp"

namespace pairloc {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kRecordCsvHeader =
    "w,n,seed,lsr,thouless_v1,thouless_v2,thouless_v3,entropy,entropy_pred,pr_z,pr_pair,pr_z_pred";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

nlohmann::json to_json(const PositionSample& sample);
PositionSample position_sample_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PairSet& pairs);

nlohmann::json to_json(const ObservableRecord& record);
nlohmann::json to_json(const WPointStats& point);

/// Config echo plus run diagnostics.
nlohmann::json ensemble_metadata(const EnsembleConfig& config, const EnsembleResult& result,
                                 bool w_grid_is_default);

void write_records_csv(std::ostream& out, const std::vector<ObservableRecord>& records);

/// Parses rows written by write_records_csv. Only the columns of the CSV
/// schema are filled.
std::vector<ObservableRecord> read_records_csv(std::istream& in);

void write_summary_csv(std::ostream& out, const EnsembleStats& stats);

}  // namespace pairloc
