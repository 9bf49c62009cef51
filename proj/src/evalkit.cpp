#include "aqi/evalkit.hpp"

#include <cmath>
#include <cstdlib>

namespace aqi::eval {

void ConfusionTally::add(Term actual, Term predicted) {
    const bool a = boundary_.unhealthy(actual);
    const bool p = boundary_.unhealthy(predicted);
    if (a && p) ++counts_.tp;
    else if (!a && p) ++counts_.fp;
    else if (!a && !p) ++counts_.tn;
    else ++counts_.fn;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
    ClassificationMetrics m;
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.accuracy = ratio(c.tp + c.tn, c.total());
    // 2TP / (2TP + FP + FN) equals the harmonic mean whenever both are defined,
    // and stays exact in integers.
    if (m.precision && m.recall) {
        m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    }
    return m;
}

double category_accuracy(std::span<const Term> actual, std::span<const Term> predicted) {
    if (actual.size() != predicted.size()) throw ValidationError("series lengths differ");
    if (actual.empty()) throw ValidationError("empty series");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) hits += actual[i] == predicted[i];
    return static_cast<double>(hits) / static_cast<double>(actual.size());
}

ErrorMetrics error_metrics(std::span<const int> actual, std::span<const int> predicted) {
    if (actual.size() != predicted.size()) {
        throw ValidationError("series lengths differ: " + std::to_string(actual.size()) + " vs " +
                              std::to_string(predicted.size()));
    }
    if (actual.empty()) throw ValidationError("empty series");
    long long abs_sum = 0;
    long long sq_sum = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const long long d = std::llabs(static_cast<long long>(actual[i]) - predicted[i]);
        abs_sum += d;
        sq_sum += d * d;
    }
    const double n = static_cast<double>(actual.size());
    return {static_cast<double>(abs_sum) / n, std::sqrt(static_cast<double>(sq_sum) / n)};
}

ErrorMetrics error_metrics(std::span<const Term> actual, std::span<const Term> predicted) {
    std::vector<int> a, p;
    a.reserve(actual.size());
    p.reserve(predicted.size());
    for (Term t : actual) a.push_back(static_cast<int>(index(t)));
    for (Term t : predicted) p.push_back(static_cast<int>(index(t)));
    return error_metrics(std::span<const int>(a), std::span<const int>(p));
}

OntologyScores ontology_scores(const OntologyScoreInput& in) {
    if (!(in.classes > 0)) throw ValidationError("ontology score needs at least one class");
    const double linked = in.subclass_axioms + in.relations;
    if (!(linked > 0)) throw ValidationError("ontology score needs subclass axioms or relations");
    OntologyScores s;
    s.model = (in.relations * in.classes * 100.0 + linked * in.properties) / (linked * in.classes);
    s.knowledge_base = (in.classes * 100.0 + in.individuals) / in.classes;
    return s;
}

std::string format_metric(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string("undefined");
}

}  // namespace aqi::eval
