#include "pipeline.hpp"

#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <system_error>

#include "aqi/resources.hpp"
#include "json.hpp"

namespace aqi::cli {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void OutputSet::add(std::filesystem::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
}

void OutputSet::commit() {
    std::vector<std::filesystem::path> placed;
    std::vector<std::filesystem::path> staged;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& p : staged) std::filesystem::remove(p, ec);
        for (const auto& p : placed) std::filesystem::remove(p, ec);
    };
    try {
        for (const auto& [path, content] : files_) {
            if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
            auto tmp = path;
            tmp += ".partial";
            staged.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) throw Error("cannot write " + path.string());
        }
        for (std::size_t i = 0; i < files_.size(); ++i) {
            std::filesystem::rename(staged[i], files_[i].first);
            placed.push_back(files_[i].first);
        }
    } catch (const std::filesystem::filesystem_error& e) {
        cleanup();
        throw Error(e.what());
    } catch (...) {
        cleanup();
        throw;
    }
    files_.clear();
}

it2::ParameterTable load_params(const std::optional<std::filesystem::path>& path) {
    if (!path) return it2::default_parameter_table();
    return it2::load_parameter_table(read_file(*path));
}

fahp::MatrixFile load_matrix(const std::optional<std::filesystem::path>& path) {
    if (!path) return fahp::default_matrix();
    return fahp::parse_matrix(read_file(*path));
}

std::string weights_report(const fahp::MatrixFile& matrix, const fahp::WeightResult& result) {
    std::ostringstream out;
    out << "criterion  weight\n";
    for (std::size_t i = 0; i < result.weights.criteria.size(); ++i) {
        std::string label = result.weights.criteria[i];
        label.resize(11, ' ');
        out << label << format_fixed(result.weights.values[i], 4) << '\n';
    }
    const auto& c = result.consistency;
    out << "lambda_max " << format_fixed(c.lambda_max, 4) << '\n'
        << "CI         " << format_fixed(c.ci, 4) << '\n'
        << "CR         " << format_fixed(c.cr, 4) << '\n';
    for (const auto& w : matrix.warnings) out << "warning: " << w << '\n';
    return out.str();
}

std::vector<AssessedRow> assess_records(const std::vector<ingest::CleanRecord>& records,
                                        const inference::Engine& engine) {
    std::vector<AssessedRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        AssessedRow row;
        row.record = r;
        row.assessment = engine.assess(r.concentration);
        for (Variable p : kPollutants) {
            row.pollutant_categories[index(p)] =
                inference::categorize(p, r.concentration[p], engine.table());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string assessed_csv(const std::vector<AssessedRow>& rows) {
    std::ostringstream out;
    out << "StationId,Date,AQI_L,AQI_R,AQI,Category,Actual";
    for (Variable p : kPollutants) out << ',' << name(p) << "_Category";
    out << '\n';
    for (const auto& r : rows) {
        const auto& iv = r.assessment.interval;
        out << r.record.station << ',' << r.record.date << ',' << format_fixed(iv.aqi_l, 3) << ','
            << format_fixed(iv.aqi_r, 3) << ',' << format_fixed(iv.aqi, 3) << ','
            << name(r.assessment.category) << ',' << name(r.record.bucket);
        for (Variable p : kPollutants) out << ',' << name(r.pollutant_categories[index(p)]);
        out << '\n';
    }
    return out.str();
}

std::vector<kg::Triple> rows_to_triples(const std::vector<AssessedRow>& rows) {
    std::vector<kg::Triple> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        kg::ObservationFacts facts;
        facts.station = rows[i].record.station;
        facts.aqi_value = rows[i].assessment.interval.aqi;
        facts.aqi_category = rows[i].assessment.category;
        facts.pollutant_categories = rows[i].pollutant_categories;
        auto ts = kg::observation_to_triples(i + 1, facts);
        out.insert(out.end(), ts.begin(), ts.end());
    }
    return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw ValidationError("empty sampling range");
    // Largest multiple of bound that fits; draws above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) {
        throw ValidationError("cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " rows");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

MetricsReport evaluate(const std::vector<Term>& actual, const std::vector<Term>& predicted,
                       eval::HealthyBoundary boundary) {
    if (actual.size() != predicted.size()) throw ValidationError("prediction and label counts differ");
    MetricsReport m;
    m.samples = actual.size();
    m.boundary = boundary;
    eval::ConfusionTally tally(boundary);
    for (std::size_t i = 0; i < actual.size(); ++i) tally.add(actual[i], predicted[i]);
    m.confusion = tally.counts();
    m.classification = eval::classification_metrics(m.confusion);
    m.category_accuracy = eval::category_accuracy(actual, predicted);
    m.errors = eval::error_metrics(actual, predicted);
    return m;
}

std::string metrics_text(const MetricsReport& m) {
    std::ostringstream out;
    out << "samples            " << m.samples << '\n'
        << "unhealthy from     " << name(m.boundary.first_unhealthy) << '\n'
        << "TP FP TN FN        " << m.confusion.tp << ' ' << m.confusion.fp << ' ' << m.confusion.tn << ' '
        << m.confusion.fn << '\n'
        << "precision          " << eval::format_metric(m.classification.precision) << '\n'
        << "recall             " << eval::format_metric(m.classification.recall) << '\n'
        << "accuracy           " << eval::format_metric(m.classification.accuracy) << '\n'
        << "f1                 " << eval::format_metric(m.classification.f1) << '\n'
        << "category accuracy  " << format_fixed(m.category_accuracy, 4) << '\n'
        << "MAE                " << format_fixed(m.errors.mae, 4) << '\n'
        << "RMSE               " << format_fixed(m.errors.rmse, 4) << '\n';
    return out.str();
}

std::string metrics_json(const MetricsReport& m) {
    auto metric = [](const std::optional<double>& v) -> nlohmann::ordered_json {
        if (v) return *v;
        return "undefined";
    };
    nlohmann::ordered_json j;
    j["samples"] = m.samples;
    j["first_unhealthy"] = std::string(name(m.boundary.first_unhealthy));
    j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn},
                      {"fn", m.confusion.fn}};
    j["precision"] = metric(m.classification.precision);
    j["recall"] = metric(m.classification.recall);
    j["accuracy"] = metric(m.classification.accuracy);
    j["f1"] = metric(m.classification.f1);
    j["category_accuracy"] = m.category_accuracy;
    j["mae"] = m.errors.mae;
    j["rmse"] = m.errors.rmse;
    return j.dump(2) + "\n";
}

std::map<std::string, std::string> run_demo() {
    std::map<std::string, std::string> out;
    std::ostringstream summary;

    const auto loaded = ingest::parse_csv(resources::demo_sample());
    const auto pre = ingest::preprocess(loaded.records);
    out["clean.csv"] = ingest::write_clean_csv(pre.records);
    out["stats.txt"] = ingest::stats_text(pre.stats);
    out["stats.json"] = ingest::stats_json(pre.stats);
    summary << "rows: " << pre.stats.rows_in << " read, " << pre.stats.rows_dropped << " dropped, "
            << pre.stats.rows_kept << " kept\n";

    const auto& matrix = fahp::default_matrix();
    const auto weights = fahp::compute_weights(matrix.matrix, matrix.criteria);
    out["weights.txt"] = weights_report(matrix, weights);
    summary << "consistency ratio: " << format_fixed(weights.consistency.cr, 4) << '\n';

    const auto& table = it2::default_parameter_table();
    const auto rb = rules::generate_rules(ingest::observed_ranges(pre.records), table);
    summary << "fuzzy rules: " << rb.size() << '\n';
    const inference::Engine engine(table, rb, fahp::pollutant_weights(weights.weights));
    const auto rows = assess_records(pre.records, engine);
    out["assessed.csv"] = assessed_csv(rows);

    kg::TripleStore store;
    store.add_all(rows_to_triples(rows));
    out["observations.nt"] = kg::serialize(store);
    const auto stats = kg::materialize(store, kg::parse_rules(resources::reasoning_rules()));
    out["inferred.nt"] = kg::serialize(store);
    summary << "triples: " << store.size() - stats.inferred << " asserted, " << stats.inferred
            << " inferred in " << stats.iterations << " passes\n";

    out["query1.tsv"] = kg::format_table(kg::execute_query(store, kg::parse_query(resources::query1())));
    out["query2.tsv"] = kg::format_table(kg::execute_query(store, kg::parse_query(resources::query2())));
    std::string dl;
    for (const auto& t : kg::dl_membership(store, kg::parse_dl_query(resources::dl_query3()))) {
        dl += kg::to_string(t) + '\n';
    }
    out["dl_query3.txt"] = dl;

    const auto counts = kg::ontology_counts(kg::parse_schema(resources::schema()), store);
    std::ostringstream c;
    c << "classes            " << counts.classes << '\n'
      << "object properties  " << counts.object_properties << '\n'
      << "data properties    " << counts.data_properties << '\n'
      << "individuals        " << counts.individuals << '\n'
      << "subclass axioms    " << counts.subclass_axioms << '\n'
      << "logical axioms     " << counts.logical_axioms << '\n';
    out["counts.txt"] = c.str();

    std::vector<Term> actual, predicted;
    for (const auto& r : rows) {
        actual.push_back(r.record.bucket);
        predicted.push_back(r.assessment.category);
    }
    const auto m = evaluate(actual, predicted);
    out["metrics.txt"] = metrics_text(m);
    out["metrics.json"] = metrics_json(m);
    summary << "category accuracy: " << format_fixed(m.category_accuracy, 4)
            << ", MAE " << format_fixed(m.errors.mae, 4) << ", RMSE " << format_fixed(m.errors.rmse, 4)
            << '\n';
    out["summary.txt"] = summary.str();
    return out;
}

}  // namespace aqi::cli
