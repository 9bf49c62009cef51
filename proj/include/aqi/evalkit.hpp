#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqi/common.hpp"

namespace aqi::eval {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Categories at or above `first_unhealthy` are the positive class.
struct HealthyBoundary {
    Term first_unhealthy = Term::Moderate;

    bool unhealthy(Term t) const noexcept { return index(t) >= index(first_unhealthy); }
};

/// Running confusion counts over (actual, predicted) pairs.
class ConfusionTally {
public:
    explicit ConfusionTally(HealthyBoundary boundary = {}) : boundary_(boundary) {}

    void add(Term actual, Term predicted);
    const ConfusionCounts& counts() const noexcept { return counts_; }
    HealthyBoundary boundary() const noexcept { return boundary_; }

private:
    HealthyBoundary boundary_;
    ConfusionCounts counts_;
};

/// nullopt marks an undefined metric (zero denominator).
struct ClassificationMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> accuracy;
    std::optional<double> f1;
};

ClassificationMetrics classification_metrics(const ConfusionCounts& c);

/// Fraction of pairs whose six-way category matches exactly.
double category_accuracy(std::span<const Term> actual, std::span<const Term> predicted);

struct ErrorMetrics {
    double mae = 0.0;
    double rmse = 0.0;
};

/// MAE and root-mean-square error on category codes 0..5. Throws
/// ValidationError on empty input or a length mismatch.
ErrorMetrics error_metrics(std::span<const Term> actual, std::span<const Term> predicted);
ErrorMetrics error_metrics(std::span<const int> actual, std::span<const int> predicted);

struct OntologyScoreInput {
    double classes = 0;
    double subclass_axioms = 0;
    double relations = 0;   ///< object properties
    double properties = 0;  ///< data properties
    double individuals = 0;
};

struct OntologyScores {
    double model = 0.0;           ///< Rel*100/(Subclass+Rel) + Prop/Class
    double knowledge_base = 0.0;  ///< (Class*100 + Individual)/Class
};

/// Throws ValidationError when classes or (subclass + relations) is zero.
OntologyScores ontology_scores(const OntologyScoreInput& in);

/// "0.7500" style text, or "undefined".
std::string format_metric(const std::optional<double>& v, int decimals = 4);

}  // namespace aqi::eval
