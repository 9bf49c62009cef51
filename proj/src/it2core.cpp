#include "aqi/it2core.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <sstream>

#include "aqi/resources.hpp"

namespace aqi::it2 {

void validate(const Trapezoid& t) {
    for (double v : {t.a, t.b, t.c, t.d, t.h}) {
        if (!std::isfinite(v)) throw ValidationError("trapezoid parameter is not finite");
    }
    if (!(t.a <= t.b && t.b <= t.c && t.c <= t.d)) {
        throw ValidationError("trapezoid requires a <= b <= c <= d, got (" +
                              format_number(t.a) + ", " + format_number(t.b) + ", " +
                              format_number(t.c) + ", " + format_number(t.d) + ")");
    }
    if (!(t.h > 0.0 && t.h <= 1.0)) {
        throw ValidationError("trapezoid height must lie in (0, 1], got " + format_number(t.h));
    }
}

namespace {

void require_finite(double x) {
    if (!std::isfinite(x)) throw ValidationError("membership argument is not finite");
}

double eval_unchecked(const Trapezoid& t, double x) {
    if (x < t.a || x > t.d) return 0.0;
    if (x >= t.b && x <= t.c) return t.h;
    if (x < t.b) return t.h * (x - t.a) / (t.b - t.a);
    // c < x <= d, so d > c.
    return t.h * (t.d - x) / (t.d - t.c);
}

}  // namespace

double eval(const Trapezoid& t, double x) {
    require_finite(x);
    return eval_unchecked(t, x);
}

double eval_saturated(const Trapezoid& t, double x) {
    require_finite(x);
    if (x >= t.c) return t.h;
    return eval_unchecked(t, x);
}

void validate(const IT2TrapezoidSet& s) {
    validate(s.umf);
    validate(s.lmf);
    if (s.lmf.h > s.umf.h) throw ValidationError("lower membership height exceeds upper height");
    if (s.lmf.a < s.umf.a || s.lmf.d > s.umf.d) {
        throw ValidationError("lower membership support is not inside the upper support");
    }
    if (!fou_contained(s)) {
        throw ValidationError("lower membership function exceeds the upper one");
    }
}

bool fou_contained(const IT2TrapezoidSet& s, std::size_t points) {
    const double lo = s.umf.a;
    const double hi = s.umf.d;
    if (points < 2 || hi == lo) {
        return eval_unchecked(s.lmf, lo) <= eval_unchecked(s.umf, lo);
    }
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = i + 1 == points ? hi : lo + step * static_cast<double>(i);
        if (eval_unchecked(s.lmf, x) > eval_unchecked(s.umf, x)) return false;
    }
    return true;
}

MembershipInterval membership_interval(const IT2TrapezoidSet& s, double x, bool saturate) {
    require_finite(x);
    if (x < 0.0) throw ValidationError("negative concentration " + format_number(x));
    if (saturate) return {eval_saturated(s.lmf, x), eval_saturated(s.umf, x)};
    return {eval_unchecked(s.lmf, x), eval_unchecked(s.umf, x)};
}

const IT2TrapezoidSet& ParameterTable::at(Variable v, Term t) const {
    const auto& slot = sets_[index(v)][index(t)];
    if (!slot) {
        throw std::out_of_range("no membership set for " + std::string(name(v)) + "." +
                                std::string(name(t)));
    }
    return *slot;
}

std::vector<Term> ParameterTable::terms(Variable v) const {
    std::vector<Term> out;
    for (Term t : kTerms) {
        if (has(v, t)) out.push_back(t);
    }
    return out;
}

Term ParameterTable::top_term(Variable v) const {
    for (auto it = kTerms.rbegin(); it != kTerms.rend(); ++it) {
        if (has(v, *it)) return *it;
    }
    throw std::out_of_range("no membership sets for " + std::string(name(v)));
}

void ParameterTable::set(Variable v, const IT2TrapezoidSet& s) {
    try {
        it2::validate(s);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(name(v)) + "." + std::string(name(s.term)) + ": " +
                              e.what());
    }
    sets_[index(v)][index(s.term)] = s;
}

void ParameterTable::validate() const {
    for (Variable v : kVariables) {
        if (terms(v).empty()) {
            throw ValidationError("variable " + std::string(name(v)) + " has no terms");
        }
    }
    for (Term t : kTerms) {
        if (!has(Variable::AQI, t)) {
            throw ValidationError("AQI variable is missing term " + std::string(name(t)));
        }
    }
}

namespace {

class ConfigParser {
public:
    explicit ConfigParser(std::string_view text) : text_(text) {}

    ParameterTable parse() {
        struct Pending {
            Variable variable;
            Term term;
            std::optional<Trapezoid> umf;
            std::optional<Trapezoid> lmf;
            std::size_t line;
        };
        std::vector<Pending> sections;
        bool seen[kVariableCount][kTermCount] = {};

        while (next_line()) {
            skip_spaces();
            if (at_end_of_line()) continue;
            if (peek() == '[') {
                const std::size_t header_line = line_no_;
                const std::size_t header_col = column();
                ++pos_;
                const std::string var_key = key();
                skip_spaces();
                expect('.');
                const std::string term_key = key();
                skip_spaces();
                expect(']');
                expect_end();
                const auto v = parse_variable(var_key);
                if (!v) fail("unknown variable '" + var_key + "'", header_col);
                const auto t = parse_term(term_key);
                if (!t) fail("unknown term '" + term_key + "'", header_col);
                if (seen[index(*v)][index(*t)]) {
                    fail("duplicate section " + var_key + "." + term_key, header_col);
                }
                seen[index(*v)][index(*t)] = true;
                sections.push_back({*v, *t, std::nullopt, std::nullopt, header_line});
                continue;
            }
            const std::size_t key_col = column();
            const std::string k = key();
            skip_spaces();
            expect('=');
            skip_spaces();
            const Trapezoid trap = tuple();
            expect_end();
            if (sections.empty()) fail("key '" + k + "' outside of any section", key_col);
            auto& cur = sections.back();
            if (k == "umf") {
                if (cur.umf) fail("duplicate key 'umf'", key_col);
                cur.umf = trap;
            } else if (k == "lmf") {
                if (cur.lmf) fail("duplicate key 'lmf'", key_col);
                cur.lmf = trap;
            } else {
                fail("unknown key '" + k + "'", key_col);
            }
        }

        ParameterTable table;
        for (const auto& s : sections) {
            const std::string label = std::string(name(s.variable)) + "." + std::string(name(s.term));
            if (!s.umf || !s.lmf) {
                throw ParseError("section " + label + " needs both umf and lmf", s.line, 1);
            }
            table.set(s.variable, IT2TrapezoidSet{s.term, *s.umf, *s.lmf});
        }
        table.validate();
        return table;
    }

private:
    bool next_line() {
        if (line_end_ >= text_.size() && line_no_ > 0) return false;
        line_start_ = line_no_ == 0 ? 0 : line_end_ + 1;
        if (line_start_ > text_.size()) return false;
        line_end_ = text_.find('\n', line_start_);
        if (line_end_ == std::string_view::npos) line_end_ = text_.size();
        pos_ = line_start_;
        ++line_no_;
        return true;
    }

    std::size_t column() const { return pos_ - line_start_ + 1; }
    char peek() const { return pos_ < line_end_ ? text_[pos_] : '\0'; }

    bool at_end_of_line() const {
        return pos_ >= line_end_ || text_[pos_] == '#' || text_[pos_] == '\r';
    }

    void skip_spaces() {
        while (pos_ < line_end_ && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t col = 0) const {
        throw ParseError(msg, line_no_, col == 0 ? column() : col);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void expect_end() {
        skip_spaces();
        if (!at_end_of_line()) fail("unexpected trailing text");
    }

    std::string key() {
        skip_spaces();
        std::string out;
        if (peek() == '"') {
            ++pos_;
            while (pos_ < line_end_ && text_[pos_] != '"') out.push_back(text_[pos_++]);
            if (peek() != '"') fail("unterminated quoted key");
            ++pos_;
        } else {
            while (pos_ < line_end_) {
                const char c = text_[pos_];
                const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
                if (!ok) break;
                out.push_back(c);
                ++pos_;
            }
        }
        if (out.empty()) fail("expected a key");
        return out;
    }

    double number() {
        skip_spaces();
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + line_end_;
        if (first < last && *first == '+') ++first;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{}) fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    Trapezoid tuple() {
        expect('[');
        std::array<double, 5> v{};
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                skip_spaces();
                expect(',');
            }
            v[i] = number();
        }
        skip_spaces();
        expect(']');
        return {v[0], v[1], v[2], v[3], v[4]};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    std::size_t line_end_ = 0;
    std::size_t line_no_ = 0;
};

std::string tuple_text(const Trapezoid& t) {
    return "[" + format_number(t.a) + ", " + format_number(t.b) + ", " + format_number(t.c) +
           ", " + format_number(t.d) + ", " + format_number(t.h) + "]";
}

}  // namespace

ParameterTable load_parameter_table(std::string_view text) { return ConfigParser(text).parse(); }

std::string serialize_parameter_table(const ParameterTable& table) {
    std::ostringstream out;
    bool first = true;
    for (Variable v : kVariables) {
        for (Term t : table.terms(v)) {
            const auto& s = table.at(v, t);
            if (!first) out << '\n';
            first = false;
            out << "[\"" << name(v) << "\"." << name(t) << "]\n";
            out << "umf = " << tuple_text(s.umf) << '\n';
            out << "lmf = " << tuple_text(s.lmf) << '\n';
        }
    }
    return out.str();
}

std::string_view default_parameter_text() { return resources::parameters(); }

const ParameterTable& default_parameter_table() {
    static const ParameterTable table = load_parameter_table(default_parameter_text());
    return table;
}

}  // namespace aqi::it2
