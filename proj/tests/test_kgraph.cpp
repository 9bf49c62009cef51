#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "aqi/kgraph.hpp"
#include "aqi/resources.hpp"

using namespace aqi::kg;

namespace {

Term aq(std::string_view n) { return Term::local(n); }
Term var(std::string n) { return Term::variable(std::move(n)); }
Term type() { return Term::iri(std::string(kRdfType)); }

TripleStore demo_store() {
    TripleStore s;
    s.add_all(parse_triples(aqi::resources::demo_kb()));
    return s;
}

TripleStore reasoned_demo() {
    auto s = demo_store();
    materialize(s, parse_rules(aqi::resources::reasoning_rules()));
    return s;
}

bool has(const TripleStore& s, std::string_view subj, std::string_view pred, std::string_view obj) {
    return s.contains({aq(subj), aq(pred), aq(obj)});
}

std::set<std::string> triple_set(const TripleStore& s) {
    std::set<std::string> out;
    for (const auto& e : s.entries()) {
        out.insert(to_string(e.triple.subject) + " " + to_string(e.triple.predicate) + " " +
                   to_string(e.triple.object));
    }
    return out;
}

// Nested-loop matcher over a plain triple list.
using Row = std::map<std::string, std::string>;

bool unify(const Term& pattern, const Term& value, Row& row) {
    if (!pattern.is_variable()) return pattern == value;
    const auto key = pattern.value();
    const auto text = to_string(value);
    auto it = row.find(key);
    if (it == row.end()) {
        row.emplace(key, text);
        return true;
    }
    return it->second == text;
}

void brute(const std::vector<Triple>& triples, const std::vector<Triple>& pattern, std::size_t k, Row row,
           std::set<Row>& out) {
    if (k == pattern.size()) {
        out.insert(row);
        return;
    }
    for (const auto& t : triples) {
        Row next = row;
        if (unify(pattern[k].subject, t.subject, next) && unify(pattern[k].predicate, t.predicate, next) &&
            unify(pattern[k].object, t.object, next)) {
            brute(triples, pattern, k + 1, next, out);
        }
    }
}

std::set<Row> rows_of(const std::vector<Binding>& bs) {
    std::set<Row> out;
    for (const auto& b : bs) {
        Row r;
        for (const auto& [k, v] : b) r.emplace(k, to_string(v));
        out.insert(r);
    }
    return out;
}

}  // namespace

TEST_CASE("term identity and order") {
    CHECK(Term::number(1.5, "1.5", std::string(kXsd) + "float") == Term::number(1.5));
    CHECK(Term::local("X") == Term::iri(std::string(kNamespace) + "X"));
    CHECK_FALSE(Term::text("X") == Term::local("X"));
    CHECK(term_less(Term::number(400), Term::number(90)) == false);
    CHECK(term_less(Term::number(1e9), Term::local("A")));
    CHECK(term_less(Term::local("Observation12"), Term::local("Observation2")));
    CHECK(term_less(Term::local("Z"), Term::text("A")));
    CHECK(Term::number(1.5).hash() == Term::number(1.5, "1.50").hash());
}

TEST_CASE("parse and serialize triples") {
    const auto ts = parse_triples(aqi::resources::demo_kb());
    CHECK(ts.size() == 31);
    CHECK(ts.front() == Triple{aq("Observation1"), type(), aq("Observation")});
    const auto speed = ts.back().object;
    CHECK(speed.is_number());
    CHECK(speed.numeric() == 1.5);
    CHECK(to_string(speed) == "\"1.5\"^^xsd:float");

    TripleStore s;
    s.add_all(ts);
    CHECK(s.size() == 31);
    CHECK_FALSE(s.add(ts[3]));
    const auto again = parse_triples(serialize(s));
    CHECK(again == ts);

    CHECK(parse_triples("# only a comment\n").empty());
    CHECK_THROWS_AS(parse_triples("aq:A aq:b .\n"), aqi::ParseError);
    CHECK_THROWS_AS(parse_triples("aq:A aq:b aq:C\n"), aqi::ParseError);
    CHECK_THROWS_AS(s.add({Term::number(1), aq("p"), aq("o")}), aqi::ValidationError);
    CHECK_THROWS_AS(s.add({aq("s"), aq("p"), var("x")}), aqi::ValidationError);
}

TEST_CASE("rule parsing") {
    const auto rules = parse_rules(aqi::resources::reasoning_rules());
    REQUIRE(rules.size() == 6);
    CHECK(rules[0].name == "primary-classification");
    CHECK(rules[0].body.size() == 8);
    CHECK(rules[0].head.size() == 1);
    CHECK(rules[0].body[0].predicate == type());
    CHECK(rules[1].head.size() == 9);
    CHECK(rules[2].body[3].kind == Atom::Kind::LessThan);

    const auto unnamed = parse_rules("A(?x) -> B(?x)\nC(?x) -> D(?x)\n");
    REQUIRE(unnamed.size() == 2);
    CHECK(unnamed[1].name == "rule2");

    CHECK_THROWS_AS(parse_rules("A(?x) -> p(?x, ?y)\n"), aqi::ParseError);  // unsafe head
    CHECK_THROWS_AS(parse_rules("A(?x) ^ swrlb:lessThan(?y, 2) -> B(?x)\n"), aqi::ParseError);
    CHECK_THROWS_AS(parse_rules("[r] A(?x) -> B(?x)\n[r] C(?x) -> D(?x)\n"), aqi::ParseError);
    CHECK_THROWS_AS(parse_rules("A(?x) B(?x)\n"), aqi::ParseError);
    CHECK(parse_rules("").empty());
}

TEST_CASE("materialization derives the expected facts") {
    const auto s = reasoned_demo();
    CHECK(has(s, "Observation1", "hasAQICategory", "AQISevere"));
    for (const char* impact : {"PrematureMortalityRisk", "BreathingDifficulty"}) {
        CHECK(has(s, "Observation1", "hasImpact", impact));
    }
    CHECK(has(s, "Observation1", "hasRecommendedAction", "IndustrialShutdown"));
    CHECK(has(s, "Observation1", "determinesActuator", "IndustrialEmissionController_Instance"));
    CHECK(has(s, "Observation1", "appliesPenalty", "IndustrialClosure"));
    CHECK(has(s, "Observation1", "hasEscalationEvent", "AQIEscalation_Instance"));
    CHECK(has(s, "Observation3", "hasRecommendedAction", "ConstructionBan"));
    CHECK(has(s, "Observation10", "hasRecommendedAction", "ConstructionBan"));
    CHECK(has(s, "Observation2", "hasAQICategory", "AQIModerate"));
    CHECK(has(s, "Observation2", "determinesPriority", "mediumPriorityInstance"));
    CHECK_FALSE(has(s, "Observation2", "hasAQICategory", "AQISevere"));
    CHECK_FALSE(has(s, "Observation3", "hasEscalationEvent", "AQIEscalation_Instance"));
}

TEST_CASE("materialization records provenance and is idempotent") {
    auto s = demo_store();
    const auto rules = parse_rules(aqi::resources::reasoning_rules());
    const auto first = materialize(s, rules);
    CHECK(first.inferred == 16);
    std::size_t inferred = 0;
    for (const auto& e : s.entries()) {
        if (!e.inferred) continue;
        ++inferred;
        CHECK_FALSE(e.rule.empty());
    }
    CHECK(inferred == first.inferred);
    const auto before = s.size();
    const auto second = materialize(s, rules);
    CHECK(second.inferred == 0);
    CHECK(s.size() == before);
    CHECK(serialize(s).find("# inferred by severe-consequences") != std::string::npos);
}

TEST_CASE("materialization does not depend on rule order") {
    auto rules = parse_rules(aqi::resources::reasoning_rules());
    auto a = demo_store();
    materialize(a, rules);
    std::reverse(rules.begin(), rules.end());
    auto b = demo_store();
    materialize(b, rules);
    CHECK(triple_set(a) == triple_set(b));
}

TEST_CASE("wind threshold") {
    const auto rules = parse_rules(aqi::resources::reasoning_rules());
    for (double speed : {1.5, 2.5}) {
        TripleStore s;
        s.add({aq("W"), type(), aq("WeatherObservation")});
        s.add({aq("W"), aq("hasWeatherType"), aq("Wind")});
        s.add({aq("W"), aq("hasWindSpeed"), Term::number(speed)});
        s.add({aq("O"), aq("hasPM10Category"), aq("PM10_Severe")});
        materialize(s, rules);
        CHECK(has(s, "O", "hasEscalationEvent", "AQIEscalation_Instance") == (speed < 2.0));
    }
}

TEST_CASE("materialization stops at the iteration cap") {
    // Each pass adds one more link of a chain.
    TripleStore s;
    for (int i = 0; i < 10; ++i) s.add({aq("N" + std::to_string(i)), aq("next"), aq("N" + std::to_string(i + 1))});
    s.add({aq("N0"), aq("reach"), aq("N0")});
    const auto rules = parse_rules("reach(?a, ?b) ^ next(?b, ?c) -> reach(?a, ?c)\n");
    auto copy = s;
    CHECK_THROWS_AS(materialize(copy, rules, 3), aqi::InferenceError);
    CHECK(materialize(s, rules).inferred == 10);
}

TEST_CASE("solve matches a nested-loop oracle") {
    std::mt19937_64 rng(99);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    for (int trial = 0; trial < 60; ++trial) {
        TripleStore store;
        std::vector<Triple> triples;
        const int size = 1 + pick(200);
        for (int i = 0; i < size; ++i) {
            Triple t{aq("s" + std::to_string(pick(8))), aq("p" + std::to_string(pick(3))),
                     pick(4) == 0 ? Term::number(pick(5)) : aq("s" + std::to_string(pick(8)))};
            if (store.add(t)) triples.push_back(t);
        }
        std::vector<Triple> pattern;
        std::vector<Atom> atoms;
        const int n = 1 + pick(trial % 4 == 0 ? 3 : 2);
        for (int k = 0; k < n; ++k) {
            auto slot = [&](bool pred) {
                if (pick(3) > 0) return var(std::string(1, static_cast<char>('a' + pick(3))));
                return pred ? aq("p" + std::to_string(pick(3))) : aq("s" + std::to_string(pick(8)));
            };
            Triple p{slot(false), slot(true), slot(false)};
            pattern.push_back(p);
            atoms.push_back({Atom::Kind::Pattern, p.subject, p.predicate, p.object});
        }
        std::set<Row> expected;
        brute(triples, pattern, 0, {}, expected);
        CAPTURE(trial);
        CHECK(rows_of(solve(store, atoms)) == expected);
    }
}

TEST_CASE("builtins filter numerically") {
    TripleStore s;
    for (int i = 0; i < 5; ++i) s.add({aq("o" + std::to_string(i)), aq("v"), Term::number(i)});
    const std::vector<Atom> atoms = {
        {Atom::Kind::GreaterThan, var("x"), {}, Term::number(1)},
        {Atom::Kind::Pattern, var("o"), aq("v"), var("x")},
        {Atom::Kind::LessThan, var("x"), {}, Term::number(4)},
    };
    CHECK(solve(s, atoms).size() == 2);
}

TEST_CASE("demo queries") {
    const auto s = reasoned_demo();
    SUBCASE("station lookup") {
        const auto t = execute_query(s, parse_query(aqi::resources::query1()));
        CHECK(t.columns == std::vector<std::string>{"obs", "aqiValue", "aqiCategory"});
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][0] == aq("Observation2"));
        CHECK(t.rows[0][1].numeric() == 142.0);
        CHECK(t.rows[0][2] == aq("AQIModerate"));
    }
    SUBCASE("construction ban, ordered") {
        const auto t = execute_query(s, parse_query(aqi::resources::query2()));
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0][0] == aq("Observation3"));
        CHECK(t.rows[0][1] == aq("AP001"));
        CHECK(t.rows[1][0] == aq("Observation10"));
        const auto text = format_table(t);
        CHECK(text.starts_with("?obs\t?station\t?aqiValue\t?aqiCategory\n"));
        CHECK(text.find("aq:Observation3\taq:AP001\t\"310.0\"^^xsd:float\taq:AQIVeryPoor") != std::string::npos);
    }
    SUBCASE("description logic membership") {
        const auto q = parse_dl_query(aqi::resources::dl_query3());
        CHECK(q.classes == std::vector<std::string>{std::string(kNamespace) + "Observation"});
        CHECK(q.values.size() == 11);
        CHECK(dl_membership(s, q) == std::vector<Term>{aq("Observation2")});
    }
    SUBCASE("contradictory constraints give nothing") {
        const auto q = parse_dl_query("Observation and hasStationId value CH001 and hasStationId value AP001");
        CHECK(dl_membership(s, q).empty());
        const auto t = execute_query(
            s, parse_query("SELECT ?o WHERE { ?o aq:hasAQICategory aq:AQISevere . "
                           "?o aq:hasAQICategory aq:AQIModerate . }"));
        CHECK(t.rows.empty());
    }
}

TEST_CASE("query features") {
    TripleStore s;
    for (int i : {12, 2, 7}) s.add({aq("Observation" + std::to_string(i)), aq("hasAQIValue"), Term::number(100 - i)});
    s.add({aq("Observation2"), aq("hasAQIValue"), Term::number(50)});
    const auto all = execute_query(s, parse_query("SELECT * WHERE { ?o aq:hasAQIValue ?v . }"));
    REQUIRE(all.rows.size() == 4);
    CHECK(all.rows[0][0] == aq("Observation12"));  // IRIs order lexicographically
    const auto by_value = execute_query(s, parse_query("SELECT ?o ?v WHERE { ?o aq:hasAQIValue ?v . } ORDER BY ?v"));
    CHECK(by_value.rows[0][1].numeric() == 50);
    CHECK(by_value.rows[3][1].numeric() == 98);
    const auto distinct = execute_query(s, parse_query("SELECT DISTINCT ?o WHERE { ?o aq:hasAQIValue ?v . }"));
    CHECK(distinct.rows.size() == 3);
    CHECK_THROWS_AS(parse_query("SELECT ?o WHERE { ?o aq:p ?v "), aqi::ParseError);
    CHECK_THROWS_AS(parse_query("SELECT ?z WHERE { ?o aq:p ?v . }"), aqi::ParseError);
}

TEST_CASE("ontology counts") {
    const auto empty = ontology_counts(Schema{}, TripleStore{});
    CHECK(empty.classes == 0);
    CHECK(empty.individuals == 0);
    CHECK(empty.logical_axioms == 0);

    const std::string text(aqi::resources::schema());
    std::size_t classes = 0, parents = 0, object_props = 0, data_props = 0, individuals = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::istringstream words(line);
        std::string kind, name, extra;
        words >> kind >> name >> extra;
        if (kind == "class") {
            ++classes;
            parents += !extra.empty();
        }
        object_props += kind == "objectProperty";
        data_props += kind == "dataProperty";
        individuals += kind == "individual";
    }
    const auto schema = parse_schema(text);
    const auto bare = ontology_counts(schema, TripleStore{});
    CHECK(bare.classes == classes);
    CHECK(bare.subclass_axioms == parents);
    CHECK(bare.object_properties == object_props);
    CHECK(bare.data_properties == data_props);
    CHECK(bare.individuals == individuals);

    const auto s = reasoned_demo();
    const auto full = ontology_counts(schema, s);
    std::size_t non_type = 0;
    for (const auto& e : s.entries()) non_type += !(e.triple.predicate == type());
    CHECK(full.individuals >= individuals + 5);  // five typed subjects in the demo graph
    CHECK(full.logical_axioms >= parents + non_type);
    CHECK_THROWS_AS(parse_schema("class A\nclass A\n"), aqi::ParseError);
}

TEST_CASE("observation triples") {
    ObservationFacts f;
    f.station = "CH001";
    f.aqi_value = 142.04;
    f.aqi_category = aqi::Term::Moderate;
    f.pollutant_categories.fill(aqi::Term::Good);
    f.pollutant_categories[aqi::index(aqi::Variable::PM10)] = aqi::Term::Moderate;
    const auto ts = observation_to_triples(7, f);
    CHECK(ts.size() == 11);
    std::set<std::string> predicates;
    for (const auto& t : ts) {
        CHECK(t.subject == aq("Observation7"));
        predicates.insert(to_string(t.predicate));
    }
    CHECK(predicates.size() == 11);
    CHECK(std::find(ts.begin(), ts.end(), Triple{aq("Observation7"), aq("hasPM10Category"), aq("PM10_Moderate")}) !=
          ts.end());
    CHECK(to_string(ts[2].object) == "\"142.0\"^^xsd:float");
    CHECK(aqi_category_name(aqi::Term::VeryPoor) == "AQIVeryPoor");
    CHECK(pollutant_category_name(aqi::Variable::PM25, aqi::Term::Satisfactory) == "PM25_Satisfactory");
    CHECK(category_property(aqi::Variable::PM25) == "hasPM25Category");
}
