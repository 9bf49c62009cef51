#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aqi/evalkit.hpp"
#include "aqi/fahp.hpp"
#include "aqi/inference.hpp"
#include "aqi/ingest.hpp"
#include "aqi/kgraph.hpp"

namespace aqi::cli {

std::string read_file(const std::filesystem::path& path);

/// Files written together: nothing reaches its final path until commit(),
/// and a failed commit removes whatever it had already placed.
class OutputSet {
public:
    void add(std::filesystem::path path, std::string content);
    void commit();
    bool empty() const noexcept { return files_.empty(); }

private:
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

it2::ParameterTable load_params(const std::optional<std::filesystem::path>& path);
fahp::MatrixFile load_matrix(const std::optional<std::filesystem::path>& path);

std::string weights_report(const fahp::MatrixFile& matrix, const fahp::WeightResult& result);

struct AssessedRow {
    ingest::CleanRecord record;
    inference::Assessment assessment;
    std::array<Term, kPollutantCount> pollutant_categories{};
};

std::vector<AssessedRow> assess_records(const std::vector<ingest::CleanRecord>& records,
                                        const inference::Engine& engine);

/// StationId, Date, AQI_L, AQI_R, AQI, Category, Actual, then one category
/// column per pollutant.
std::string assessed_csv(const std::vector<AssessedRow>& rows);

/// Observation1.. for the rows in order.
std::vector<kg::Triple> rows_to_triples(const std::vector<AssessedRow>& rows);

/// Uniform integer in [0, bound) from raw 64-bit draws (rejection sampling),
/// so sequences do not depend on the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// `k` distinct indices of [0, n) from a seeded partial Fisher-Yates shuffle.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

struct MetricsReport {
    std::size_t samples = 0;
    eval::HealthyBoundary boundary;
    eval::ConfusionCounts confusion;
    eval::ClassificationMetrics classification;
    double category_accuracy = 0.0;
    eval::ErrorMetrics errors;
};

MetricsReport evaluate(const std::vector<Term>& actual, const std::vector<Term>& predicted,
                       eval::HealthyBoundary boundary = {});
std::string metrics_text(const MetricsReport& m);
std::string metrics_json(const MetricsReport& m);

/// Full pipeline on the bundled sample. Returns artifact name -> content.
std::map<std::string, std::string> run_demo();

}  // namespace aqi::cli
