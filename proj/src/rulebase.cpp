#include "aqi/rulebase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace aqi::rules {

namespace {

// Pollutant order used when writing rules, matching the usual tabular layout.
constexpr std::array<Variable, kPollutantCount> kEmitOrder = {
    Variable::PM25, Variable::PM10, Variable::NO2, Variable::SO2,
    Variable::O3,   Variable::CO,   Variable::NH3};

std::uint32_t encode(const std::array<Term, kPollutantCount>& antecedent) {
    std::uint32_t code = 0;
    for (Term t : antecedent) code = code * kTermCount + static_cast<std::uint32_t>(index(t));
    return code;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

struct Token {
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back({std::string(line.substr(start, i - start)), start + 1});
    }
    // A trailing full stop ends the sentence; drop it from the last word.
    if (!out.empty()) {
        auto& last = out.back().text;
        if (last == ".") out.pop_back();
        else if (last.size() > 1 && last.back() == '.') last.pop_back();
    }
    return out;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, std::size_t line, std::size_t line_length)
        : tokens_(std::move(tokens)), line_(line), line_length_(line_length) {}

    FuzzyRule parse() {
        // Optional "Rule N" / "Rule N:" label.
        if (pos_ + 1 < tokens_.size() && iequals(tokens_[pos_].text, "rule")) pos_ += 2;
        expect_keyword("if");

        std::array<std::optional<Term>, kPollutantCount> seen{};
        while (true) {
            const Token& var_tok = next("pollutant name");
            const auto v = parse_variable(var_tok.text);
            if (!v || !is_pollutant(*v)) fail("unknown pollutant '" + var_tok.text + "'", var_tok.column);
            if (seen[index(*v)]) fail("pollutant " + var_tok.text + " appears twice", var_tok.column);
            expect_keyword("is");
            seen[index(*v)] = term();
            const Token& joiner = next("'and' or 'then'");
            if (iequals(joiner.text, "and")) continue;
            if (iequals(joiner.text, "then")) break;
            fail("expected 'and' or 'then', got '" + joiner.text + "'", joiner.column);
        }
        const Token& out_tok = next("AQI");
        const auto out_var = parse_variable(out_tok.text);
        if (out_var != Variable::AQI) fail("consequent must be AQI, got '" + out_tok.text + "'", out_tok.column);
        expect_keyword("is");
        const Term consequent = term();
        if (pos_ < tokens_.size()) fail("unexpected '" + tokens_[pos_].text + "'", tokens_[pos_].column);

        FuzzyRule rule;
        for (Variable p : kPollutants) {
            if (!seen[index(p)]) {
                fail("rule has no atom for " + std::string(name(p)), line_length_ + 1);
            }
            rule.antecedent[index(p)] = *seen[index(p)];
        }
        rule.consequent = consequent;
        return rule;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t column) const {
        throw ParseError(msg, line_, column);
    }

    const Token& next(const char* what) {
        if (pos_ >= tokens_.size()) fail(std::string("expected ") + what, line_length_ + 1);
        return tokens_[pos_++];
    }

    void expect_keyword(const char* kw) {
        const Token& t = next(kw);
        if (!iequals(t.text, kw)) fail(std::string("expected '") + kw + "', got '" + t.text + "'", t.column);
    }

    // One or two words ("Very Poor").
    Term term() {
        const Token& first = next("linguistic term");
        if (auto t = parse_term(first.text)) return *t;
        if (pos_ < tokens_.size()) {
            if (auto t = parse_term(first.text + tokens_[pos_].text)) {
                ++pos_;
                return *t;
            }
        }
        fail("unknown linguistic term '" + first.text + "'", first.column);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t line_length_;
};

}  // namespace

Term max_severity(const std::array<Term, kPollutantCount>& antecedent) {
    return *std::max_element(antecedent.begin(), antecedent.end());
}

RuleBase::RuleBase(std::vector<FuzzyRule> rules, Provenance provenance)
    : rules_(std::move(rules)), provenance_(provenance) {
    if (rules_.empty()) throw ValidationError("rule base is empty");
    by_antecedent_.reserve(rules_.size());
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (!by_antecedent_.emplace(encode(rules_[i].antecedent), i).second) {
            throw ValidationError("duplicate antecedent in rule " + std::to_string(i + 1) + ": " +
                                  emit_rule(rules_[i]));
        }
    }
}

const FuzzyRule* RuleBase::find(const std::array<Term, kPollutantCount>& antecedent) const {
    const auto it = by_antecedent_.find(encode(antecedent));
    return it == by_antecedent_.end() ? nullptr : &rules_[it->second];
}

RuleBase parse_rules(std::string_view text) {
    std::vector<FuzzyRule> rules;
    std::unordered_map<std::uint32_t, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        FuzzyRule rule = LineParser(std::move(tokens), line_no, line.size()).parse();
        const auto [it, inserted] = first_line.emplace(encode(rule.antecedent), line_no);
        if (!inserted) {
            throw ParseError("duplicate antecedent (first seen on line " + std::to_string(it->second) + ")",
                             line_no, 1);
        }
        rules.push_back(rule);
    }
    if (rules.empty()) throw ValidationError("rule file contains no rules");
    return RuleBase(std::move(rules), Provenance::HandAuthored);
}

std::string emit_rule(const FuzzyRule& rule) {
    std::string out = "IF ";
    for (std::size_t k = 0; k < kEmitOrder.size(); ++k) {
        if (k > 0) out += " and ";
        out += name(kEmitOrder[k]);
        out += " is ";
        out += name(rule.term_of(kEmitOrder[k]));
    }
    out += " THEN AQI is ";
    out += name(rule.consequent);
    return out;
}

std::string emit_rules(const RuleBase& rb) {
    std::string out;
    for (const auto& r : rb.rules()) {
        out += emit_rule(r);
        out += '\n';
    }
    return out;
}

std::vector<Term> retained_terms(const it2::ParameterTable& table, Variable pollutant, Range range) {
    if (!(range.min <= range.max) || !std::isfinite(range.min) || !std::isfinite(range.max)) {
        throw ValidationError("observed range for " + std::string(name(pollutant)) + " is invalid");
    }
    std::vector<Term> out;
    for (Term t : table.terms(pollutant)) {
        const auto& umf = table.at(pollutant, t).umf;
        const double lo = std::max(range.min, umf.a);
        const double hi = std::min(range.max, umf.d);
        if (lo < hi || (lo == hi && it2::eval(umf, lo) > 0.0)) out.push_back(t);
    }
    return out;
}

RuleBase generate_rules(const std::array<Range, kPollutantCount>& observed,
                        const it2::ParameterTable& table) {
    std::array<std::vector<Term>, kPollutantCount> retained;
    std::size_t total = 1;
    for (Variable p : kPollutants) {
        retained[index(p)] = retained_terms(table, p, observed[index(p)]);
        if (retained[index(p)].empty()) {
            throw ValidationError("observed range of " + std::string(name(p)) +
                                  " lies outside every membership support");
        }
        total *= retained[index(p)].size();
    }

    std::vector<FuzzyRule> rules;
    rules.reserve(total);
    std::array<std::size_t, kPollutantCount> digit{};
    for (std::size_t n = 0; n < total; ++n) {
        FuzzyRule r;
        for (std::size_t k = 0; k < kPollutantCount; ++k) r.antecedent[k] = retained[k][digit[k]];
        r.consequent = max_severity(r.antecedent);
        rules.push_back(r);
        // Odometer with the last pollutant varying fastest.
        for (std::size_t k = kPollutantCount; k-- > 0;) {
            if (++digit[k] < retained[k].size()) break;
            digit[k] = 0;
        }
    }
    return RuleBase(std::move(rules), Provenance::Generated);
}

}  // namespace aqi::rules
