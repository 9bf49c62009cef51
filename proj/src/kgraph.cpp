#include "aqi/kgraph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace aqi::kg {

namespace {

constexpr std::string_view kSwrlb = "http://www.w3.org/2003/11/swrlb#";

std::string iri_in(std::string_view ns, std::string_view local) {
    std::string out(ns);
    out += local;
    return out;
}

const Term& rdf_type() {
    static const Term t = Term::iri(std::string(kRdfType));
    return t;
}

bool is_numeric_datatype(std::string_view dt) {
    if (!dt.starts_with(kXsd)) return false;
    dt.remove_prefix(kXsd.size());
    return dt == "float" || dt == "double" || dt == "decimal" || dt == "integer" || dt == "int" ||
           dt == "long" || dt == "nonNegativeInteger";
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------------------
// Lexer shared by the triple, rule, query and class-expression parsers.

enum class Tok { Name, Var, Iri, String, Number, Label, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;      // name, variable (without '?'), IRI, string value, number, label, punct
    std::string datatype;  // String only: raw datatype (prefixed name or <iri>), may be empty
    bool datatype_is_iri = false;
    std::size_t line = 0;
    std::size_t column = 0;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = text_[pos_];
            if (c == '?' || c == '$') {
                advance();
                t.kind = Tok::Var;
                t.text = read_while(name_char);
                if (t.text.empty()) fail("empty variable name", t);
            } else if (c == '<') {
                advance();
                t.kind = Tok::Iri;
                t.text = read_until('>', t);
            } else if (c == '"') {
                advance();
                t.kind = Tok::String;
                t.text = read_string(t);
                if (peek(0) == '^' && peek(1) == '^') {
                    advance();
                    advance();
                    if (peek(0) == '<') {
                        advance();
                        t.datatype = read_until('>', t);
                        t.datatype_is_iri = true;
                    } else {
                        t.datatype = read_name();
                        if (t.datatype.empty()) fail("missing datatype after ^^", t);
                    }
                } else if (peek(0) == '@') {
                    advance();
                    read_while(name_char);  // language tag, ignored
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                t.kind = Tok::Number;
                t.text = read_number();
            } else if (c == '@' && name_start(peek(1))) {
                advance();
                t.kind = Tok::Name;
                t.text = "@" + read_while(name_char);
            } else if (name_start(c) || c == ':') {
                t.kind = Tok::Name;
                t.text = read_name();
            } else if (c == '[') {
                advance();
                t.kind = Tok::Label;
                t.text = read_until(']', t);
            } else if (c == '-' && peek(1) == '>') {
                advance();
                advance();
                t.kind = Tok::Punct;
                t.text = "->";
            } else if (std::string_view("(),^{}.*;").find(c) != std::string_view::npos) {
                advance();
                t.kind = Tok::Punct;
                t.text = std::string(1, c);
            } else {
                fail(std::string("unexpected character '") + c + "'", t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    [[noreturn]] void fail(const std::string& msg, const Token& at) const {
        throw ParseError(msg, at.line, at.column);
    }

    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    template <class Pred>
    std::string read_while(Pred pred) {
        std::string out;
        while (pos_ < text_.size() && pred(text_[pos_])) {
            out.push_back(text_[pos_]);
            advance();
        }
        return out;
    }

    std::string read_until(char close, const Token& at) {
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != close) {
            if (text_[pos_] == '\n') fail(std::string("unterminated, expected '") + close + "'", at);
            out.push_back(text_[pos_]);
            advance();
        }
        if (pos_ >= text_.size()) fail(std::string("unterminated, expected '") + close + "'", at);
        advance();
        return out;
    }

    std::string read_string(const Token& at) {
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\n') fail("unterminated string literal", at);
            if (c == '\\' && pos_ + 1 < text_.size()) {
                advance();
                c = text_[pos_];
                if (c == 'n') c = '\n';
                else if (c == 't') c = '\t';
            }
            out.push_back(c);
            advance();
        }
        if (pos_ >= text_.size()) fail("unterminated string literal", at);
        advance();
        return out;
    }

    // prefix:local, prefix:, :local or a bare name.
    std::string read_name() {
        std::string out = read_while(name_char);
        if (peek(0) == ':') {
            out.push_back(':');
            advance();
            out += read_while(name_char);
        }
        return out;
    }

    std::string read_number() {
        std::string out;
        if (peek(0) == '-' || peek(0) == '+') {
            out.push_back(text_[pos_]);
            advance();
        }
        auto digits = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
        out += read_while(digits);
        if (peek(0) == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            out.push_back('.');
            advance();
            out += read_while(digits);
        }
        if ((peek(0) == 'e' || peek(0) == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            out.push_back(text_[pos_]);
            advance();
            if (peek(0) == '-' || peek(0) == '+') {
                out.push_back(text_[pos_]);
                advance();
            }
            out += read_while(digits);
        }
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// Token cursor with prefix resolution.
class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {
        prefixes_[""] = std::string(kNamespace);
        prefixes_["aq"] = std::string(kNamespace);
        prefixes_["rdf"] = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
        prefixes_["rdfs"] = "http://www.w3.org/2000/01/rdf-schema#";
        prefixes_["owl"] = "http://www.w3.org/2002/07/owl#";
        prefixes_["xsd"] = std::string(kXsd);
        prefixes_["swrlb"] = std::string(kSwrlb);
    }

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Tok::End; }

    bool is_punct(std::string_view p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    bool is_keyword(std::string_view kw) const {
        if (peek().kind != Tok::Name || peek().text.size() != kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(peek().text[i])) !=
                std::tolower(static_cast<unsigned char>(kw[i]))) {
                return false;
            }
        }
        return true;
    }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
        next();
    }
    void expect_keyword(std::string_view kw) {
        if (!is_keyword(kw)) fail("expected " + std::string(kw));
        next();
    }

    [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }
    [[noreturn]] void fail(const std::string& msg, const Token& at) const {
        std::string what = msg;
        if (at.kind == Tok::End) what += " (at end of input)";
        else what += " near '" + at.text + "'";
        throw ParseError(what, at.line, at.column);
    }

    void declare_prefix(const std::string& prefix, const std::string& iri) { prefixes_[prefix] = iri; }

    std::string resolve(const Token& t) const {
        const auto colon = t.text.find(':');
        if (colon == std::string::npos) return iri_in(kNamespace, t.text);
        const auto it = prefixes_.find(t.text.substr(0, colon));
        if (it == prefixes_.end()) fail("unknown prefix '" + t.text.substr(0, colon) + "'", t);
        return it->second + t.text.substr(colon + 1);
    }

    Term literal(const Token& t) const {
        if (t.kind == Tok::Number) {
            const auto v = parse_number(t.text);
            if (!v) fail("bad number", t);
            const bool integral = t.text.find_first_of(".eE") == std::string::npos;
            return Term::number(*v, t.text, iri_in(kXsd, integral ? "integer" : "decimal"));
        }
        // String
        if (t.datatype.empty()) return Term::text(t.text);
        std::string dt;
        if (t.datatype_is_iri) {
            dt = t.datatype;
        } else if (t.datatype.find(':') == std::string::npos) {
            dt = iri_in(kXsd, t.datatype);  // ^^float
        } else {
            Token tmp = t;
            tmp.text = t.datatype;
            dt = resolve(tmp);
        }
        if (is_numeric_datatype(dt)) {
            const auto v = parse_number(t.text);
            if (!v) fail("literal is not a valid " + dt, t);
            return Term::number(*v, t.text, dt);
        }
        return Term::text(t.text);
    }

    // Any term in a triple/query position. `a` maps to rdf:type in predicate position.
    Term term(bool predicate_position = false) {
        const Token& t = next();
        switch (t.kind) {
            case Tok::Var:
                return Term::variable(t.text);
            case Tok::Iri:
                return Term::iri(t.text);
            case Tok::Name:
                if (predicate_position && t.text == "a") return rdf_type();
                return Term::iri(resolve(t));
            case Tok::Number:
            case Tok::String:
                return literal(t);
            default:
                fail("expected a term", t);
        }
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::map<std::string, std::string> prefixes_;
};

void check_ground_triple(const Triple& t) {
    if (t.subject.is_variable() || t.predicate.is_variable() || t.object.is_variable()) {
        throw ValidationError("triple contains a variable");
    }
    if (!t.subject.is_iri()) throw ValidationError("triple subject must be an IRI: " + to_string(t.subject));
    if (!t.predicate.is_iri()) {
        throw ValidationError("triple predicate must be an IRI: " + to_string(t.predicate));
    }
}

std::optional<Term> substitute(const Term& t, const Binding& b) {
    if (!t.is_variable()) return t;
    const auto it = b.find(t.value());
    if (it == b.end()) return std::nullopt;
    return it->second;
}

Term instantiate(const Term& t, const Binding& b) {
    auto v = substitute(t, b);
    if (!v) throw InferenceError("unbound variable ?" + t.value());
    return *v;
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.value()) == out.end()) {
        out.push_back(t.value());
    }
}

std::vector<std::string> atom_vars(const Atom& a) {
    std::vector<std::string> out;
    collect_vars(a.subject, out);
    if (a.kind == Atom::Kind::Pattern) collect_vars(a.predicate, out);
    collect_vars(a.object, out);
    return out;
}

bool builtin_holds(const Atom& a, const Binding& b) {
    const Term x = instantiate(a.subject, b);
    const Term y = instantiate(a.object, b);
    if (!x.is_number() || !y.is_number()) return false;
    return a.kind == Atom::Kind::LessThan ? x.numeric() < y.numeric() : x.numeric() > y.numeric();
}

class Solver {
public:
    Solver(const TripleStore& store, const std::vector<Atom>& atoms)
        : store_(store), atoms_(atoms), done_(atoms.size(), false) {}

    std::vector<Binding> run() {
        Binding b;
        step(b);
        return std::move(out_);
    }

private:
    bool bound(const Term& t, const Binding& b) const {
        return !t.is_variable() || b.contains(t.value());
    }

    void step(Binding& b) {
        // Builtins as soon as both arguments are known.
        std::vector<std::size_t> checked;
        bool ok = true;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const Atom& a = atoms_[i];
            if (done_[i] || a.kind == Atom::Kind::Pattern) continue;
            if (!bound(a.subject, b) || !bound(a.object, b)) continue;
            done_[i] = true;
            checked.push_back(i);
            if (!builtin_holds(a, b)) {
                ok = false;
                break;
            }
        }
        if (ok) expand(b);
        for (std::size_t i : checked) done_[i] = false;
    }

    void expand(Binding& b) {
        std::size_t best = atoms_.size();
        int best_score = -1;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const Atom& a = atoms_[i];
            if (done_[i] || a.kind != Atom::Kind::Pattern) continue;
            const int score = int(bound(a.subject, b)) * 2 + int(bound(a.predicate, b)) +
                              int(bound(a.object, b)) * 2;
            if (score > best_score) {
                best = i;
                best_score = score;
            }
        }
        if (best == atoms_.size()) {
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (!done_[i]) throw InferenceError("builtin argument is never bound");
            }
            out_.push_back(b);
            return;
        }

        const Atom& a = atoms_[best];
        const auto s = substitute(a.subject, b);
        const auto p = substitute(a.predicate, b);
        const auto o = substitute(a.object, b);
        done_[best] = true;
        for (std::size_t idx : store_.match(s, p, o)) {
            const Triple& t = store_.entries()[idx].triple;
            std::vector<std::string> added;
            bool consistent = true;
            auto bind = [&](const Term& pattern, const Term& value) {
                if (!pattern.is_variable()) return;
                const auto it = b.find(pattern.value());
                if (it != b.end()) {
                    if (!(it->second == value)) consistent = false;
                    return;
                }
                b.emplace(pattern.value(), value);
                added.push_back(pattern.value());
            };
            bind(a.subject, t.subject);
            bind(a.predicate, t.predicate);
            bind(a.object, t.object);
            if (consistent) step(b);
            for (const auto& v : added) b.erase(v);
        }
        done_[best] = false;
    }

    const TripleStore& store_;
    const std::vector<Atom>& atoms_;
    std::vector<bool> done_;
    std::vector<Binding> out_;
};

// Rule atom: Name(arg) or Name(arg, arg).
Atom parse_rule_atom(Parser& ps) {
    const Token head = ps.next();
    if (head.kind != Tok::Name) ps.fail("expected an atom", head);
    ps.expect_punct("(");
    std::vector<Term> args;
    while (true) {
        const Token& t = ps.peek();
        if (t.kind == Tok::Var || t.kind == Tok::Number || t.kind == Tok::String ||
            t.kind == Tok::Iri || t.kind == Tok::Name) {
            args.push_back(ps.term());
        } else {
            ps.fail("expected an argument");
        }
        if (ps.is_punct(",")) {
            ps.next();
            continue;
        }
        break;
    }
    ps.expect_punct(")");

    const std::string iri = ps.resolve(head);
    Atom a;
    if (iri.starts_with(kSwrlb)) {
        const std::string_view op = std::string_view(iri).substr(kSwrlb.size());
        if (op == "lessThan") a.kind = Atom::Kind::LessThan;
        else if (op == "greaterThan") a.kind = Atom::Kind::GreaterThan;
        else ps.fail("unsupported builtin " + head.text, head);
        if (args.size() != 2) ps.fail("builtin takes two arguments", head);
        a.subject = args[0];
        a.object = args[1];
        return a;
    }
    if (args.size() == 1) {
        a.subject = args[0];
        a.predicate = rdf_type();
        a.object = Term::iri(iri);
    } else if (args.size() == 2) {
        a.subject = args[0];
        a.predicate = Term::iri(iri);
        a.object = args[1];
    } else {
        ps.fail("atoms take one or two arguments", head);
    }
    if (a.subject.kind() == Term::Kind::Number || a.subject.kind() == Term::Kind::Text) {
        ps.fail("atom subject cannot be a literal", head);
    }
    return a;
}

std::string compact_iri(const std::string& iri) {
    static const std::array<std::pair<std::string_view, std::string_view>, 5> known = {{
        {kNamespace, "aq:"},
        {"http://www.w3.org/1999/02/22-rdf-syntax-ns#", "rdf:"},
        {"http://www.w3.org/2000/01/rdf-schema#", "rdfs:"},
        {"http://www.w3.org/2002/07/owl#", "owl:"},
        {kXsd, "xsd:"},
    }};
    for (const auto& [ns, prefix] : known) {
        if (iri.starts_with(ns)) {
            const std::string local = iri.substr(ns.size());
            if (!local.empty() && std::all_of(local.begin(), local.end(), name_char)) {
                return std::string(prefix) + local;
            }
        }
    }
    return "<" + iri + ">";
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out + "\"";
}

std::string safe_local(std::string_view s) {
    std::string out;
    for (char c : s) out.push_back(name_char(c) ? c : '_');
    if (out.empty() || !name_start(out.front())) out.insert(out.begin(), '_');
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Term Term::iri(std::string full) {
    Term t;
    t.kind_ = Kind::Iri;
    t.value_ = std::move(full);
    return t;
}

Term Term::local(std::string_view name) { return iri(iri_in(kNamespace, name)); }

Term Term::number(double value, std::string lexical, std::string datatype) {
    Term t;
    t.kind_ = Kind::Number;
    t.number_ = value;
    t.value_ = lexical.empty() ? format_number(value) : std::move(lexical);
    t.datatype_ = datatype.empty() ? iri_in(kXsd, "decimal") : std::move(datatype);
    return t;
}

Term Term::text(std::string value) {
    Term t;
    t.kind_ = Kind::Text;
    t.value_ = std::move(value);
    return t;
}

Term Term::variable(std::string name) {
    Term t;
    t.kind_ = Kind::Variable;
    t.value_ = std::move(name);
    return t;
}

bool operator==(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Term::Kind::Number) return a.number_ == b.number_;
    return a.value_ == b.value_;
}

std::size_t Term::hash() const noexcept {
    const std::size_t k = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL;
    if (kind_ == Kind::Number) return k ^ std::hash<double>{}(number_ == 0.0 ? 0.0 : number_);
    return k ^ std::hash<std::string>{}(value_);
}

bool term_less(const Term& a, const Term& b) {
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    if (a.is_number() && a.numeric() != b.numeric()) return a.numeric() < b.numeric();
    return a.value() < b.value();
}

std::string to_string(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Iri:
            return compact_iri(t.value());
        case Term::Kind::Number:
            return quote(t.value()) + "^^" + compact_iri(t.datatype());
        case Term::Kind::Text:
            return quote(t.value());
        case Term::Kind::Variable:
            return "?" + t.value();
    }
    return {};
}

std::string local_name(const Term& t) {
    if (!t.is_iri()) return t.value();
    const std::string& v = t.value();
    if (v.starts_with(kNamespace)) return v.substr(kNamespace.size());
    const auto cut = v.find_last_of("#/");
    return cut == std::string::npos ? v : v.substr(cut + 1);
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
    std::size_t h = t.subject.hash();
    h = h * 31 + t.predicate.hash();
    h = h * 31 + t.object.hash();
    return h;
}

bool TripleStore::insert(const Triple& t, bool inferred, const std::string& rule) {
    check_ground_triple(t);
    if (index_.contains(t)) return false;
    const std::size_t idx = entries_.size();
    entries_.push_back({t, inferred, rule});
    index_.emplace(t, idx);
    by_subject_[t.subject.value()].push_back(idx);
    by_predicate_[t.predicate.value()].push_back(idx);
    return true;
}

bool TripleStore::add(const Triple& t) { return insert(t, false, {}); }

bool TripleStore::add_inferred(const Triple& t, const std::string& rule) {
    return insert(t, true, rule);
}

void TripleStore::add_all(const std::vector<Triple>& ts) {
    for (const auto& t : ts) add(t);
}

std::vector<std::size_t> TripleStore::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                            const std::optional<Term>& o) const {
    static const std::vector<std::size_t> none;
    const std::vector<std::size_t>* candidates = nullptr;
    std::vector<std::size_t> all;
    if (s) {
        if (!s->is_iri()) return {};
        const auto it = by_subject_.find(s->value());
        candidates = it == by_subject_.end() ? &none : &it->second;
    } else if (p) {
        if (!p->is_iri()) return {};
        const auto it = by_predicate_.find(p->value());
        candidates = it == by_predicate_.end() ? &none : &it->second;
    } else {
        all.resize(entries_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        candidates = &all;
    }
    std::vector<std::size_t> out;
    for (std::size_t idx : *candidates) {
        const Triple& t = entries_[idx].triple;
        if (s && !(t.subject == *s)) continue;
        if (p && !(t.predicate == *p)) continue;
        if (o && !(t.object == *o)) continue;
        out.push_back(idx);
    }
    return out;
}

std::vector<Triple> parse_triples(std::string_view text) {
    Parser ps(text);
    std::vector<Triple> out;
    while (!ps.at_end()) {
        if (ps.is_keyword("@prefix") || ps.is_keyword("prefix")) {
            ps.next();
            const Token p = ps.next();
            if (p.kind != Tok::Name || !p.text.ends_with(':')) ps.fail("expected a prefix name", p);
            const Token iri = ps.next();
            if (iri.kind != Tok::Iri) ps.fail("expected <iri>", iri);
            ps.declare_prefix(p.text.substr(0, p.text.size() - 1), iri.text);
            if (ps.is_punct(".")) ps.next();
            continue;
        }
        const Token& at = ps.peek();
        Triple t;
        t.subject = ps.term();
        t.predicate = ps.term(true);
        t.object = ps.term();
        ps.expect_punct(".");
        try {
            check_ground_triple(t);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), at.line, at.column);
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::string serialize(const TripleStore& store) {
    std::string out;
    for (const auto& e : store.entries()) {
        out += to_string(e.triple.subject);
        out += ' ';
        out += to_string(e.triple.predicate);
        out += ' ';
        out += to_string(e.triple.object);
        out += " .";
        if (e.inferred) out += "  # inferred by " + e.rule;
        out += '\n';
    }
    return out;
}

std::vector<HornRule> parse_rules(std::string_view text) {
    Parser ps(text);
    std::vector<HornRule> out;
    std::set<std::string> names;
    while (!ps.at_end()) {
        const Token start = ps.peek();
        HornRule r;
        if (start.kind == Tok::Label) {
            r.name = ps.next().text;
        } else {
            r.name = "rule" + std::to_string(out.size() + 1);
        }
        r.body.push_back(parse_rule_atom(ps));
        while (ps.is_punct("^")) {
            ps.next();
            r.body.push_back(parse_rule_atom(ps));
        }
        ps.expect_punct("->");
        r.head.push_back(parse_rule_atom(ps));
        while (ps.is_punct("^")) {
            ps.next();
            r.head.push_back(parse_rule_atom(ps));
        }
        if (ps.is_punct(".")) ps.next();

        if (!names.insert(r.name).second) throw ParseError("duplicate rule name " + r.name, start.line, start.column);
        std::vector<std::string> bound;
        for (const auto& a : r.body) {
            if (a.kind == Atom::Kind::Pattern) {
                for (auto& v : atom_vars(a)) bound.push_back(v);
            }
        }
        auto is_bound = [&](const std::string& v) {
            return std::find(bound.begin(), bound.end(), v) != bound.end();
        };
        for (const auto& a : r.body) {
            if (a.kind == Atom::Kind::Pattern) continue;
            for (const auto& v : atom_vars(a)) {
                if (!is_bound(v)) {
                    throw ParseError("rule " + r.name + ": builtin variable ?" + v +
                                         " does not occur in a body atom",
                                     start.line, start.column);
                }
            }
        }
        for (const auto& a : r.head) {
            if (a.kind != Atom::Kind::Pattern) {
                throw ParseError("rule " + r.name + ": builtins are not allowed in the head", start.line,
                                 start.column);
            }
            for (const auto& v : atom_vars(a)) {
                if (!is_bound(v)) {
                    throw ParseError("rule " + r.name + ": head variable ?" + v + " is not bound by the body",
                                     start.line, start.column);
                }
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

MaterializeStats materialize(TripleStore& store, const std::vector<HornRule>& rules,
                             std::size_t max_iterations) {
    MaterializeStats stats;
    while (true) {
        if (stats.iterations >= max_iterations) {
            throw InferenceError("reasoning did not reach a fixpoint within " +
                                 std::to_string(max_iterations) + " iterations");
        }
        ++stats.iterations;
        bool changed = false;
        for (const auto& rule : rules) {
            const auto bindings = solve(store, rule.body);
            for (const auto& b : bindings) {
                for (const auto& h : rule.head) {
                    Triple t{instantiate(h.subject, b), instantiate(h.predicate, b),
                             instantiate(h.object, b)};
                    if (store.add_inferred(t, rule.name)) {
                        changed = true;
                        ++stats.inferred;
                    }
                }
            }
        }
        if (!changed) return stats;
    }
}

std::vector<Binding> solve(const TripleStore& store, const std::vector<Atom>& atoms) {
    return Solver(store, atoms).run();
}

SelectQuery parse_query(std::string_view text) {
    Parser ps(text);
    SelectQuery q;
    while (ps.is_keyword("prefix")) {
        ps.next();
        const Token p = ps.next();
        if (p.kind != Tok::Name || !p.text.ends_with(':')) ps.fail("expected a prefix name", p);
        const Token iri = ps.next();
        if (iri.kind != Tok::Iri) ps.fail("expected <iri>", iri);
        ps.declare_prefix(p.text.substr(0, p.text.size() - 1), iri.text);
    }
    ps.expect_keyword("select");
    if (ps.is_keyword("distinct")) {
        ps.next();
        q.distinct = true;
    }
    bool star = false;
    if (ps.is_punct("*")) {
        ps.next();
        star = true;
    } else {
        while (ps.peek().kind == Tok::Var) q.projection.push_back(ps.next().text);
        if (q.projection.empty()) ps.fail("SELECT needs at least one variable");
    }
    if (ps.is_keyword("where")) ps.next();
    ps.expect_punct("{");
    while (!ps.is_punct("}")) {
        if (ps.at_end()) ps.fail("expected '}'");
        Atom a;
        a.subject = ps.term();
        a.predicate = ps.term(true);
        a.object = ps.term();
        q.where.push_back(std::move(a));
        if (ps.is_punct(".")) ps.next();
        else if (!ps.is_punct("}")) ps.fail("expected '.' or '}'");
    }
    ps.next();
    if (q.where.empty()) ps.fail("empty WHERE clause");

    std::vector<std::string> vars;
    for (const auto& a : q.where) {
        for (auto& v : atom_vars(a)) {
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        }
    }
    if (star) q.projection = vars;
    auto check = [&](const std::string& v) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
            throw ParseError("variable ?" + v + " does not occur in WHERE");
        }
    };
    for (const auto& v : q.projection) check(v);

    if (ps.is_keyword("order")) {
        ps.next();
        ps.expect_keyword("by");
        while (ps.peek().kind == Tok::Var) {
            q.order_by.push_back(ps.next().text);
            check(q.order_by.back());
        }
        if (q.order_by.empty()) ps.fail("ORDER BY needs at least one variable");
    }
    if (!ps.at_end()) ps.fail("unexpected trailing input");
    return q;
}

ResultTable execute_query(const TripleStore& store, const SelectQuery& q) {
    ResultTable out;
    out.columns = q.projection;
    for (const auto& b : solve(store, q.where)) {
        std::vector<Term> row;
        row.reserve(q.projection.size());
        for (const auto& v : q.projection) row.push_back(b.at(v));
        out.rows.push_back(std::move(row));
    }
    auto row_less = [](const std::vector<Term>& a, const std::vector<Term>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), term_less);
    };
    std::sort(out.rows.begin(), out.rows.end(), row_less);
    if (q.distinct) {
        out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
    }
    if (!q.order_by.empty()) {
        // Order keys may include unprojected variables, so re-solve with keys attached.
        std::vector<std::pair<std::vector<Term>, std::vector<Term>>> keyed;
        if (std::all_of(q.order_by.begin(), q.order_by.end(), [&](const std::string& v) {
                return std::find(q.projection.begin(), q.projection.end(), v) != q.projection.end();
            })) {
            for (auto& row : out.rows) {
                std::vector<Term> key;
                for (const auto& v : q.order_by) {
                    const auto pos = std::find(q.projection.begin(), q.projection.end(), v) - q.projection.begin();
                    key.push_back(row[static_cast<std::size_t>(pos)]);
                }
                keyed.emplace_back(std::move(key), std::move(row));
            }
        } else {
            for (const auto& b : solve(store, q.where)) {
                std::vector<Term> key, row;
                for (const auto& v : q.order_by) key.push_back(b.at(v));
                for (const auto& v : q.projection) row.push_back(b.at(v));
                keyed.emplace_back(std::move(key), std::move(row));
            }
            std::sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
                return row_less(x.second, y.second);
            });
            if (q.distinct) {
                std::vector<std::pair<std::vector<Term>, std::vector<Term>>> uniq;
                for (auto& k : keyed) {
                    if (uniq.empty() || !(uniq.back().second == k.second)) uniq.push_back(std::move(k));
                }
                keyed = std::move(uniq);
            }
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [&](const auto& x, const auto& y) { return row_less(x.first, y.first); });
        out.rows.clear();
        for (auto& k : keyed) out.rows.push_back(std::move(k.second));
    }
    return out;
}

std::string format_table(const ResultTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) out += '\t';
        out += "?" + table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += '\t';
            out += to_string(row[i]);
        }
        out += '\n';
    }
    return out;
}

DlQuery parse_dl_query(std::string_view text) {
    Parser ps(text);
    DlQuery q;
    while (true) {
        const Token first = ps.next();
        if (first.kind != Tok::Name) ps.fail("expected a class or property name", first);
        if (ps.is_keyword("value")) {
            ps.next();
            const Term prop = Term::iri(ps.resolve(first));
            const Token& v = ps.peek();
            if (v.kind != Tok::Name && v.kind != Tok::Iri && v.kind != Tok::Number && v.kind != Tok::String) {
                ps.fail("expected an individual or literal after 'value'");
            }
            q.values.emplace_back(prop, ps.term());
        } else {
            q.classes.push_back(ps.resolve(first));
        }
        if (ps.at_end()) break;
        ps.expect_keyword("and");
    }
    return q;
}

std::vector<Term> dl_membership(const TripleStore& store, const DlQuery& q) {
    if (q.classes.empty() && q.values.empty()) throw ValidationError("empty class expression");
    const Term x = Term::variable("x");
    std::vector<Atom> atoms;
    for (const auto& c : q.classes) atoms.push_back({Atom::Kind::Pattern, x, rdf_type(), Term::iri(c)});
    for (const auto& [p, v] : q.values) atoms.push_back({Atom::Kind::Pattern, x, p, v});
    std::vector<Term> out;
    for (const auto& b : solve(store, atoms)) out.push_back(b.at("x"));
    std::sort(out.begin(), out.end(), term_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Schema parse_schema(std::string_view text) {
    Schema s;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string tok; words >> tok;) w.push_back(tok);
        if (w.empty()) continue;
        const std::string& kind = w[0];
        auto declare = [&](const std::string& name) {
            if (!seen.insert(kind + " " + name).second) {
                throw ParseError("duplicate declaration of " + name, line_no, 1);
            }
        };
        if (kind == "class" && (w.size() == 2 || w.size() == 3)) {
            declare(w[1]);
            s.classes.emplace_back(w[1], w.size() == 3 ? std::optional<std::string>(w[2]) : std::nullopt);
        } else if (kind == "objectProperty" && w.size() == 2) {
            declare(w[1]);
            s.object_properties.push_back(w[1]);
        } else if (kind == "dataProperty" && w.size() == 2) {
            declare(w[1]);
            s.data_properties.push_back(w[1]);
        } else if (kind == "individual" && (w.size() == 2 || w.size() == 3)) {
            declare(w[1]);
            s.individuals.emplace_back(w[1], w.size() == 3 ? std::optional<std::string>(w[2]) : std::nullopt);
        } else {
            throw ParseError("expected 'class', 'objectProperty', 'dataProperty' or 'individual'", line_no, 1);
        }
    }
    for (const auto& [c, parent] : s.classes) {
        if (parent && !seen.contains("class " + *parent)) {
            throw ParseError("class " + c + " names undeclared parent " + *parent);
        }
    }
    return s;
}

OntologyCounts ontology_counts(const Schema& schema, const TripleStore& store) {
    OntologyCounts c;
    c.classes = schema.classes.size();
    c.object_properties = schema.object_properties.size();
    c.data_properties = schema.data_properties.size();
    for (const auto& [name, parent] : schema.classes) {
        if (parent) ++c.subclass_axioms;
    }

    std::set<std::string> individuals;
    std::set<std::pair<std::string, std::string>> class_assertions;
    for (const auto& [name, cls] : schema.individuals) {
        const std::string iri = iri_in(kNamespace, name);
        individuals.insert(iri);
        if (cls) class_assertions.emplace(iri, iri_in(kNamespace, *cls));
    }
    std::size_t property_assertions = 0;
    for (const auto& e : store.entries()) {
        const Triple& t = e.triple;
        if (t.predicate == rdf_type() && t.object.is_iri()) {
            individuals.insert(t.subject.value());
            class_assertions.emplace(t.subject.value(), t.object.value());
        } else {
            ++property_assertions;
        }
    }
    c.individuals = individuals.size();
    c.logical_axioms = c.subclass_axioms + class_assertions.size() + property_assertions;
    return c;
}

std::string observation_name(std::size_t n) { return "Observation" + std::to_string(n); }

std::string pollutant_category_name(Variable pollutant, aqi::Term t) {
    return std::string(iri_fragment(pollutant)) + "_" + std::string(name(t));
}

std::string aqi_category_name(aqi::Term t) { return "AQI" + std::string(name(t)); }

std::string category_property(Variable pollutant) {
    return "has" + std::string(iri_fragment(pollutant)) + "Category";
}

std::vector<Triple> observation_to_triples(std::size_t n, const ObservationFacts& facts) {
    if (facts.station.empty()) throw ValidationError("observation without a station id");
    if (!std::isfinite(facts.aqi_value)) throw ValidationError("observation AQI value is not finite");
    const Term obs = Term::local(observation_name(n));
    std::vector<Triple> out;
    out.push_back({obs, rdf_type(), Term::local("Observation")});
    out.push_back({obs, Term::local("hasStationId"), Term::local(safe_local(facts.station))});
    const std::string lexical = format_fixed(facts.aqi_value, 1);
    out.push_back({obs, Term::local("hasAQIValue"),
                   Term::number(*parse_number(lexical), lexical, iri_in(kXsd, "float"))});
    out.push_back({obs, Term::local("hasAQICategory"), Term::local(aqi_category_name(facts.aqi_category))});
    for (Variable p : kPollutants) {
        out.push_back({obs, Term::local(category_property(p)),
                       Term::local(pollutant_category_name(p, facts.pollutant_categories[index(p)]))});
    }
    return out;
}

}  // namespace aqi::kg
