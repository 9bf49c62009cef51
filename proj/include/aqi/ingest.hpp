#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqi/common.hpp"
#include "aqi/inference.hpp"
#include "aqi/it2core.hpp"

namespace aqi::ingest {

/// One CSV row as read. Missing cells are nullopt.
struct RawRecord {
    std::string station;
    std::string date;
    std::array<std::optional<double>, kPollutantCount> concentration{};
    std::optional<double> aqi;
    std::optional<Term> bucket;
};

/// Complete row: every concentration present and non-negative, label known.
struct CleanRecord {
    std::string station;
    std::string date;
    inference::PollutantVector concentration;
    std::optional<double> aqi;
    Term bucket = Term::Good;
};

/// A cell that could not be read. The cell is treated as missing.
struct CellIssue {
    std::size_t line = 0;
    std::string column;
    std::string value;
    std::string reason;
};

struct ColumnReport {
    std::vector<std::string> recognized;
    std::vector<std::string> ignored;
    std::string station_column;  ///< "StationId" or "City"
};

struct LoadResult {
    std::vector<RawRecord> records;
    ColumnReport columns;
    std::vector<CellIssue> issues;
};

/// Reads a CPCB-style export (StationId or City, Date, pollutant columns,
/// AQI, AQI_Bucket). Throws ParseError when mandatory columns are absent.
LoadResult parse_csv(std::string_view text);
LoadResult load_csv(const std::filesystem::path& path);

enum class ImputeScope { Global, Station };

struct DatasetStats {
    std::size_t rows_in = 0;
    std::size_t rows_dropped = 0;
    std::size_t rows_kept = 0;
    std::array<double, kPollutantCount> medians{};
    std::array<std::size_t, kPollutantCount> missing_before{};
    std::array<std::size_t, kPollutantCount> missing_after{};
    ImputeScope scope = ImputeScope::Global;
};

struct Preprocessed {
    std::vector<CleanRecord> records;
    DatasetStats stats;
};

/// Median of the values; the mean of the two central values for even counts.
/// Throws ValidationError on an empty input.
double median(std::vector<double> values);

/// Drops rows without a label, then fills missing concentrations with the
/// median of the kept rows (per station when `scope` is Station, falling
/// back to the global median for stations with no values).
Preprocessed preprocess(const std::vector<RawRecord>& records, ImputeScope scope = ImputeScope::Global);

struct UnitWarning {
    std::size_t row = 0;  ///< 0-based index into the records
    Variable pollutant = Variable::PM25;
    double value = 0.0;
    double bound = 0.0;
};

/// Flags concentrations above 1.5x the upper support end of each pollutant's
/// most severe term. Never modifies the data.
std::vector<UnitWarning> validate_units(const std::vector<CleanRecord>& records,
                                        const it2::ParameterTable& table);

/// Cleaned CSV with the canonical header.
std::string write_clean_csv(const std::vector<CleanRecord>& records);

std::string stats_text(const DatasetStats& stats);
std::string stats_json(const DatasetStats& stats);

/// Observed [min, max] per pollutant.
std::array<rules::Range, kPollutantCount> observed_ranges(const std::vector<CleanRecord>& records);

}  // namespace aqi::ingest
