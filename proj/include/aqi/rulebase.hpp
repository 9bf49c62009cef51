#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aqi/common.hpp"
#include "aqi/it2core.hpp"

namespace aqi::rules {

/// IF every pollutant is its antecedent term THEN AQI is `consequent`.
/// Antecedents are indexed in aqi::kPollutants order.
struct FuzzyRule {
    std::array<Term, kPollutantCount> antecedent{};
    Term consequent = Term::Good;

    Term term_of(Variable pollutant) const { return antecedent[index(pollutant)]; }

    friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

/// Most severe term among the antecedents.
Term max_severity(const std::array<Term, kPollutantCount>& antecedent);

enum class Provenance { Generated, HandAuthored };

/// Ordered, duplicate-free, non-empty list of rules.
class RuleBase {
public:
    /// Throws ValidationError on an empty list or a repeated antecedent.
    RuleBase(std::vector<FuzzyRule> rules, Provenance provenance);

    const std::vector<FuzzyRule>& rules() const noexcept { return rules_; }
    std::size_t size() const noexcept { return rules_.size(); }
    Provenance provenance() const noexcept { return provenance_; }

    /// Rule with exactly this antecedent, if any.
    const FuzzyRule* find(const std::array<Term, kPollutantCount>& antecedent) const;

private:
    std::vector<FuzzyRule> rules_;
    Provenance provenance_;
    std::unordered_map<std::uint32_t, std::size_t> by_antecedent_;
};

/// Parses one rule per line:
///   IF PM2.5 is Good and PM10 is Poor and ... and NH3 is Good THEN AQI is Poor
/// Keywords are case-insensitive, "Very Poor" and "VeryPoor" are both accepted,
/// `#` starts a comment and an optional leading "Rule N" label is ignored.
RuleBase parse_rules(std::string_view text);

/// One rule per line, pollutants in the conventional reporting order.
std::string emit_rules(const RuleBase& rb);
std::string emit_rule(const FuzzyRule& rule);

struct Range {
    double min = 0.0;
    double max = 0.0;
};

/// Terms of `pollutant` whose upper membership is positive somewhere in `range`.
std::vector<Term> retained_terms(const it2::ParameterTable& table, Variable pollutant, Range range);

/// Cartesian product of the retained terms of every pollutant, in
/// lexicographic severity order, each with the max-severity consequent.
RuleBase generate_rules(const std::array<Range, kPollutantCount>& observed,
                        const it2::ParameterTable& table);

}  // namespace aqi::rules
