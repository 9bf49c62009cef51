#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqi/common.hpp"
#include "aqi/it2core.hpp"

namespace aqi::fahp {

/// Interval Type-2 trapezoidal fuzzy number on the 1-9 importance scale.
struct IT2Judgment {
    it2::Trapezoid umf;
    it2::Trapezoid lmf;

    friend bool operator==(const IT2Judgment&, const IT2Judgment&) = default;
};

/// Linguistic importance scale, weakest first.
enum class Importance { JE, WI, BWSI, SI, BSVI, VSI, BVAI, AI };

inline constexpr std::array<Importance, 8> kImportanceScale = {
    Importance::JE,   Importance::WI,  Importance::BWSI, Importance::SI,
    Importance::BSVI, Importance::VSI, Importance::BVAI, Importance::AI};

std::string_view label(Importance level);
IT2Judgment judgment(Importance level);

/// Crisp value k as a degenerate judgment (k,k,k,k;1) / (k,k,k,k;1).
IT2Judgment singleton(double k);

/// Reversed reciprocals of both trapezoids; heights kept. Throws
/// ValidationError when the support touches zero.
IT2Judgment reciprocal(const IT2Judgment& j);

/// Trapezoidal IT2 defuzzification: the mean of the upper and lower parts,
/// each ((d - a) + (h*b - a) + (h*c - a)) / 4 + a.
double dtrat(const IT2Judgment& j);

/// Value used in the crisp consistency matrix: a singleton judgment maps to
/// its point value, anything else to dtrat().
double crisp_value(const IT2Judgment& j);

/// Component-wise geometric mean of both trapezoids; heights are the row minimum.
IT2Judgment fuzzy_geometric_mean(std::span<const IT2Judgment> row);

/// Square matrix of judgments with JE on the diagonal and exact reciprocals
/// below it. Only the upper triangle is independent.
class ComparisonMatrix {
public:
    ComparisonMatrix() = default;

    /// `upper[k]` fills the strict upper triangle row by row.
    static ComparisonMatrix from_upper(std::size_t n, std::span<const IT2Judgment> upper);

    std::size_t size() const noexcept { return n_; }
    const IT2Judgment& at(std::size_t row, std::size_t col) const { return cells_[row * n_ + col]; }

    /// Replaces (row, col) with `j` and (col, row) with its reciprocal.
    void set(std::size_t row, std::size_t col, const IT2Judgment& j);

    /// Defuzzified matrix with unit diagonal, row-major.
    std::vector<double> crisp() const;

private:
    std::size_t n_ = 0;
    std::vector<IT2Judgment> cells_;
};

/// Random consistency index for matrices of order 1..10.
double random_index(std::size_t n);

struct Consistency {
    double lambda_max = 0.0;
    double ci = 0.0;
    double cr = 0.0;
    std::size_t iterations = 0;
};

/// Principal eigenvalue by power iteration on the crisp matrix, then
/// CI = (lambda - n) / (n - 1) and CR = CI / RI. Orders above 10 are rejected.
Consistency consistency(const ComparisonMatrix& m);

struct WeightVector {
    std::vector<std::string> criteria;
    std::vector<double> values;
};

struct WeightResult {
    WeightVector weights;
    std::vector<IT2Judgment> fuzzy_weights;
    Consistency consistency;
};

inline constexpr double kDefaultConsistencyThreshold = 0.10;

/// Fuzzy geometric means, fuzzy normalization, defuzzification and crisp
/// normalization. Throws ConsistencyError when CR exceeds `max_cr`.
WeightResult compute_weights(const ComparisonMatrix& m, std::vector<std::string> criteria,
                             double max_cr = kDefaultConsistencyThreshold);

/// Parsed matrix file: a header row of criteria names, then one row per
/// criterion holding scale labels (JE, WI, ..., or 1/X).
struct MatrixFile {
    std::vector<std::string> criteria;
    std::vector<std::vector<Importance>> upper_levels;  // upper_levels[i][j-i-1]
    std::vector<std::vector<bool>> upper_reciprocal;
    ComparisonMatrix matrix;
    std::vector<std::string> warnings;
};

MatrixFile parse_matrix(std::string_view text);
std::string serialize_matrix(const MatrixFile& file);

/// The shipped pollutant comparison matrix.
const MatrixFile& default_matrix();

/// Weight per pollutant in aqi::kPollutants order; throws ValidationError
/// when a pollutant is missing from the criteria.
std::array<double, kPollutantCount> pollutant_weights(const WeightVector& w);

}  // namespace aqi::fahp
