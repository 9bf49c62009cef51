#include "aqi/common.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace aqi {

namespace {

constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "PM2.5", "PM10", "CO", "O3", "NO2", "SO2", "NH3", "AQI"};

constexpr std::array<std::string_view, kVariableCount> kVariableFragments = {
    "PM25", "PM10", "CO", "O3", "NO2", "SO2", "NH3", "AQI"};

constexpr std::array<std::string_view, kTermCount> kTermNames = {
    "Good", "Satisfactory", "Moderate", "Poor", "VeryPoor", "Severe"};

// Lower-case, dropping spaces, underscores, dots and dashes.
std::string squash(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == ' ' || c == '_' || c == '.' || c == '-' || c == '\t') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::string_view name(Variable v) { return kVariableNames[index(v)]; }
std::string_view name(Term t) { return kTermNames[index(t)]; }
std::string_view iri_fragment(Variable v) { return kVariableFragments[index(v)]; }

std::optional<Variable> parse_variable(std::string_view text) {
    const std::string key = squash(text);
    for (Variable v : kVariables) {
        if (key == squash(kVariableFragments[index(v)])) return v;
    }
    return std::nullopt;
}

std::optional<Term> parse_term(std::string_view text) {
    const std::string key = squash(text);
    for (Term t : kTerms) {
        if (key == squash(kTermNames[index(t)])) return t;
    }
    return std::nullopt;
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(line == 0 ? what
                      : "line " + std::to_string(line) + ", column " +
                            std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ConsistencyError::ConsistencyError(const std::string& what, double ratio)
    : Error(what), ratio_(ratio) {}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

}  // namespace aqi
