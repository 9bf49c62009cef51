#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "aqi/common.hpp"

namespace aqi::kg {

inline constexpr std::string_view kNamespace = "http://example.org/airquality#";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

/// IRI, literal or variable. Numeric literals compare by value, so
/// "1.5"^^xsd:float and 1.5 denote the same term.
class Term {
public:
    enum class Kind { Number, Iri, Text, Variable };

    static Term iri(std::string full);
    static Term local(std::string_view name);  ///< IRI in the aq: namespace
    static Term number(double value, std::string lexical = {}, std::string datatype = {});
    static Term text(std::string value);
    static Term variable(std::string name);

    Kind kind() const noexcept { return kind_; }
    bool is_variable() const noexcept { return kind_ == Kind::Variable; }
    bool is_number() const noexcept { return kind_ == Kind::Number; }
    bool is_iri() const noexcept { return kind_ == Kind::Iri; }

    /// Full IRI, lexical form, text value or variable name (without '?').
    const std::string& value() const noexcept { return value_; }
    const std::string& datatype() const noexcept { return datatype_; }
    double numeric() const noexcept { return number_; }

    friend bool operator==(const Term& a, const Term& b);
    std::size_t hash() const noexcept;

private:
    Kind kind_ = Kind::Iri;
    std::string value_;
    std::string datatype_;
    double number_ = 0.0;
};

/// Total order: numbers (by value) < IRIs < text, each lexicographic.
bool term_less(const Term& a, const Term& b);

/// Compact text: aq:Name, "310.0"^^xsd:float, "text", ?var.
std::string to_string(const Term& t);

/// Part after the aq: namespace (or after the last '#' or '/'); literals as lexical form.
std::string local_name(const Term& t);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept;
};

/// Ground triples with asserted/inferred provenance. One writer or many
/// concurrent readers.
class TripleStore {
public:
    struct Entry {
        Triple triple;
        bool inferred = false;
        std::string rule;  ///< rule that first derived the triple
    };

    /// Adds a ground triple; returns false if already present. Throws
    /// ValidationError for variables or a literal subject/predicate.
    bool add(const Triple& t);
    bool add_inferred(const Triple& t, const std::string& rule);
    void add_all(const std::vector<Triple>& ts);

    bool contains(const Triple& t) const { return index_.contains(t); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    /// Indices of triples matching the pattern; nullopt positions are wildcards.
    std::vector<std::size_t> match(const std::optional<Term>& s, const std::optional<Term>& p,
                                   const std::optional<Term>& o) const;

private:
    bool insert(const Triple& t, bool inferred, const std::string& rule);

    std::vector<Entry> entries_;
    std::unordered_map<Triple, std::size_t, TripleHash> index_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_subject_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_predicate_;
};

/// Line-oriented triples: `subject predicate object .` with aq:/rdf:/xsd:
/// prefixes, <full IRIs>, `a` for rdf:type, "text" and "1.0"^^xsd:float
/// literals. `#` starts a comment; `@prefix p: <iri> .` declares a prefix.
std::vector<Triple> parse_triples(std::string_view text);

/// One triple per line; inferred triples end with `# inferred by <rule>`.
std::string serialize(const TripleStore& store);

/// Triple pattern or numeric comparison builtin.
struct Atom {
    enum class Kind { Pattern, LessThan, GreaterThan };
    Kind kind = Kind::Pattern;
    Term subject;    ///< first builtin argument
    Term predicate;  ///< unused for builtins
    Term object;     ///< second builtin argument
};

/// body -> head over triple patterns. Unary atoms C(?x) mean (?x rdf:type aq:C).
struct HornRule {
    std::string name;
    std::vector<Atom> body;
    std::vector<Atom> head;
};

/// Parses rules written as
///   [label] Observation(?o) ^ hasPM10Category(?o, PM10_Severe) -> hasAQICategory(?o, AQISevere)
/// A rule ends after the last head atom not followed by '^'. Unprefixed names
/// live in the aq: namespace; `swrlb:lessThan` and `swrlb:greaterThan` are
/// the supported builtins.
std::vector<HornRule> parse_rules(std::string_view text);

struct MaterializeStats {
    std::size_t iterations = 0;
    std::size_t inferred = 0;
};

/// Applies every rule until nothing new is derived. Throws Error when
/// `max_iterations` passes do not reach the fixpoint.
MaterializeStats materialize(TripleStore& store, const std::vector<HornRule>& rules,
                             std::size_t max_iterations = 1000);

using Binding = std::unordered_map<std::string, Term>;

/// Every binding satisfying all atoms (backtracking join).
std::vector<Binding> solve(const TripleStore& store, const std::vector<Atom>& atoms);

struct SelectQuery {
    std::vector<std::string> projection;
    std::vector<Atom> where;
    std::vector<std::string> order_by;
    bool distinct = false;
};

/// PREFIX declarations, SELECT [DISTINCT] ?vars | *, WHERE { s p o . ... },
/// optional ORDER BY ?vars.
SelectQuery parse_query(std::string_view text);

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Term>> rows;
};

/// Rows ordered by ORDER BY keys, remaining ties (or no ORDER BY) by all columns.
ResultTable execute_query(const TripleStore& store, const SelectQuery& q);

/// Tab-separated header plus rows using compact term text.
std::string format_table(const ResultTable& table);

/// Conjunction of class and `property value individual` constraints.
struct DlQuery {
    std::vector<std::string> classes;
    std::vector<std::pair<Term, Term>> values;  ///< (property, value)
};

/// `Observation and hasStationId value CH001 and ...`
DlQuery parse_dl_query(std::string_view text);

/// Individuals satisfying every constraint, sorted.
std::vector<Term> dl_membership(const TripleStore& store, const DlQuery& q);

/// Declared vocabulary:
///   class <Name> [<Parent>]
///   objectProperty <name>
///   dataProperty <name>
///   individual <Name> [<Class>]
struct Schema {
    std::vector<std::pair<std::string, std::optional<std::string>>> classes;
    std::vector<std::string> object_properties;
    std::vector<std::string> data_properties;
    std::vector<std::pair<std::string, std::optional<std::string>>> individuals;
};

Schema parse_schema(std::string_view text);

struct OntologyCounts {
    std::size_t classes = 0;
    std::size_t object_properties = 0;
    std::size_t data_properties = 0;
    std::size_t individuals = 0;
    std::size_t subclass_axioms = 0;
    std::size_t logical_axioms = 0;
};

/// Individuals are declared ones plus store subjects typed with a declared
/// class. Logical axioms are subclass axioms, class assertions and property
/// assertions.
OntologyCounts ontology_counts(const Schema& schema, const TripleStore& store);

/// Assessed observation facts.
struct ObservationFacts {
    std::string station;
    double aqi_value = 0.0;
    aqi::Term aqi_category = aqi::Term::Good;
    std::array<aqi::Term, kPollutantCount> pollutant_categories{};
};

/// Individual name for observation number `n`: Observation<n>.
std::string observation_name(std::size_t n);

/// Category individual names: PM10_Severe, AQIVeryPoor, ...
std::string pollutant_category_name(Variable pollutant, aqi::Term t);
std::string aqi_category_name(aqi::Term t);
std::string category_property(Variable pollutant);  ///< hasPM25Category, ...

/// rdf:type Observation, hasStationId, hasAQIValue (xsd:float, one decimal),
/// hasAQICategory and one hasXCategory per pollutant.
std::vector<Triple> observation_to_triples(std::size_t n, const ObservationFacts& facts);

}  // namespace aqi::kg
