#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aqi {

/// Input pollutants followed by the AQI output variable. Pollutant order is the
/// health-impact dominance order used by the weight vector.
enum class Variable : std::size_t { PM25, PM10, CO, O3, NO2, SO2, NH3, AQI };

inline constexpr std::size_t kPollutantCount = 7;
inline constexpr std::size_t kVariableCount = 8;

inline constexpr std::array<Variable, kPollutantCount> kPollutants = {
    Variable::PM25, Variable::PM10, Variable::CO,  Variable::O3,
    Variable::NO2,  Variable::SO2,  Variable::NH3};

inline constexpr std::array<Variable, kVariableCount> kVariables = {
    Variable::PM25, Variable::PM10, Variable::CO,  Variable::O3,
    Variable::NO2,  Variable::SO2,  Variable::NH3, Variable::AQI};

/// Linguistic terms, ordered by severity.
enum class Term : std::size_t { Good, Satisfactory, Moderate, Poor, VeryPoor, Severe };

inline constexpr std::size_t kTermCount = 6;

inline constexpr std::array<Term, kTermCount> kTerms = {
    Term::Good, Term::Satisfactory, Term::Moderate,
    Term::Poor, Term::VeryPoor,     Term::Severe};

constexpr std::size_t index(Variable v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index(Term t) { return static_cast<std::size_t>(t); }
constexpr bool is_pollutant(Variable v) { return v != Variable::AQI; }

std::string_view name(Variable v);
std::string_view name(Term t);

/// Compact individual-name fragment used by the knowledge graph (PM25, PM10, ...).
std::string_view iri_fragment(Variable v);

/// Accepts "PM2.5", "PM25", "pm2.5", "AQI", ... Returns nullopt when unknown.
std::optional<Variable> parse_variable(std::string_view text);

/// Accepts "VeryPoor", "Very Poor", "very_poor", ... case-insensitively.
std::optional<Term> parse_term(std::string_view text);

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Pairwise comparison matrix failed the consistency gate.
class ConsistencyError : public Error {
public:
    ConsistencyError(const std::string& what, double ratio);
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

/// Inference could not produce a result (e.g. no rule fired).
class InferenceError : public Error {
public:
    using Error::Error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

}  // namespace aqi
