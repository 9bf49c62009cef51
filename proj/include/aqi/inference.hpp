#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aqi/common.hpp"
#include "aqi/it2core.hpp"
#include "aqi/rulebase.hpp"

namespace aqi::inference {

/// Concentrations indexed in aqi::kPollutants order.
struct PollutantVector {
    std::array<double, kPollutantCount> values{};

    double operator[](Variable p) const { return values[index(p)]; }
    double& operator[](Variable p) { return values[index(p)]; }
};

/// Throws ValidationError unless every concentration is finite and >= 0.
void validate(const PollutantVector& x);
std::string describe(const PollutantVector& x);

using PollutantWeights = std::array<double, kPollutantCount>;

/// Membership interval of every (pollutant, term); undefined terms stay [0, 0].
struct Fuzzified {
    std::array<std::array<it2::MembershipInterval, kTermCount>, kPollutantCount> mu{};

    const it2::MembershipInterval& at(Variable p, Term t) const { return mu[index(p)][index(t)]; }
};

/// With `saturate_top`, each pollutant's most severe term keeps its plateau
/// height beyond the end of its support.
Fuzzified fuzzify(const PollutantVector& x, const it2::ParameterTable& table,
                  bool saturate_top = true);

struct FiringInterval {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const FiringInterval&, const FiringInterval&) = default;
};

/// Minimum t-norm, taken separately over lower and upper memberships.
FiringInterval firing_interval(const rules::FuzzyRule& rule, const Fuzzified& inputs);

enum class WeightPolicy {
    Driver,     ///< heaviest pollutant whose antecedent term equals the consequent
    GlobalMax,  ///< heaviest pollutant overall
};

double rule_weight(const rules::FuzzyRule& rule, const PollutantWeights& w, WeightPolicy policy);

FiringInterval weighted_firing(const rules::FuzzyRule& rule, FiringInterval f,
                               const PollutantWeights& w,
                               WeightPolicy policy = WeightPolicy::Driver);

struct ConsequentCentroid {
    double cl = 0.0;
    double cr = 0.0;
};

struct CentroidGrid {
    double lo = 0.0;
    double hi = 600.0;
    std::size_t points = 2001;
};

/// Centroid interval of an IT2 set sampled on `grid`, with the switch point
/// found by scanning every position.
ConsequentCentroid consequent_centroid(const it2::IT2TrapezoidSet& s, CentroidGrid grid = {});

struct FiredRule {
    FiringInterval firing;
    ConsequentCentroid centroid;
};

struct KmEndpoint {
    double value = 0.0;
    std::size_t switch_point = 0;  ///< rules (after sorting) on the first side of the switch
    std::size_t iterations = 0;
};

/// Karnik-Mendel iterations for the left and right endpoints. Rules whose
/// upper firing is zero are ignored; throws InferenceError if none remain.
KmEndpoint km_left(std::span<const FiredRule> rules);
KmEndpoint km_right(std::span<const FiredRule> rules);

struct TypeReducedInterval {
    double aqi_l = 0.0;
    double aqi_r = 0.0;
    double aqi = 0.0;
};

TypeReducedInterval km_type_reduce(std::span<const FiredRule> rules);

/// Term with the largest upper membership at `aqi`, ties to the more severe
/// term; values past the top term's plateau map to the top term.
Term categorize(double aqi, const it2::ParameterTable& table);

/// Same rule for any variable, e.g. a pollutant's linguistic category.
Term categorize(Variable v, double value, const it2::ParameterTable& table);

struct InferenceOptions {
    WeightPolicy policy = WeightPolicy::Driver;
    bool saturate_top = true;
    CentroidGrid grid{};
};

struct Assessment {
    TypeReducedInterval interval;
    Term category = Term::Good;
    std::size_t fired_rules = 0;
};

/// Fuzzification through categorization for one input. Centroids of the AQI
/// terms are computed once at construction. Immutable and thread-safe.
class Engine {
public:
    Engine(const it2::ParameterTable& table, const rules::RuleBase& rb, PollutantWeights weights,
           InferenceOptions options = {});

    /// Weighted firing and consequent centroid of every rule with non-zero upper firing.
    std::vector<FiredRule> fire(const PollutantVector& x) const;

    /// Throws InferenceError naming the input when no rule fires.
    Assessment assess(const PollutantVector& x) const;

    const ConsequentCentroid& centroid(Term aqi_term) const { return centroids_[index(aqi_term)]; }
    const it2::ParameterTable& table() const noexcept { return table_; }

private:
    const it2::ParameterTable& table_;
    const rules::RuleBase& rules_;
    PollutantWeights weights_;
    InferenceOptions options_;
    std::array<ConsequentCentroid, kTermCount> centroids_{};
};

Assessment assess(const PollutantVector& x, const rules::RuleBase& rb, const PollutantWeights& w,
                  const it2::ParameterTable& table, InferenceOptions options = {});

}  // namespace aqi::inference
