// aqi: command-line front end for the IT2 fuzzy AQI pipeline.
//
// Exit status: 0 success, 1 usage, 2 data error, 3 consistency or inference failure.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pipeline.hpp"

#include "aqi/resources.hpp"

namespace fs = std::filesystem;
using namespace aqi;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kFailure = 3 };

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

void emit(cli::OutputSet& outputs, const std::string& path, std::string content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        outputs.add(path, std::move(content));
    }
}

// Rows of a small label CSV: header plus comma-separated cells.
std::vector<Term> read_labels(const fs::path& path, std::initializer_list<std::string_view> columns) {
    std::istringstream in(cli::read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty label file " + path.string());
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        for (std::string c; std::getline(ss, c, ',');) {
            while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
            cells.push_back(c);
        }
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    const auto header = split(line);
    std::size_t col = header.size();
    for (auto want : columns) {
        for (std::size_t i = 0; i < header.size() && col == header.size(); ++i) {
            if (header[i] == want) col = i;
        }
    }
    if (col == header.size()) {
        // A single-column file of labels without a recognised header.
        if (header.size() == 1 && parse_term(header[0])) {
            col = 0;
            in.clear();
            in.seekg(0);
        } else {
            throw ParseError(path.string() + ": no label column", 1, 1);
        }
    }
    std::vector<Term> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (col >= cells.size()) throw ParseError("missing label", line_no, 1);
        const auto t = parse_term(cells[col]);
        if (!t) throw ParseError("unknown category '" + cells[col] + "'", line_no, col + 1);
        out.push_back(*t);
    }
    return out;
}

inference::PollutantVector parse_point(const std::string& text) {
    inference::PollutantVector x;
    std::array<bool, kPollutantCount> seen{};
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("expected NAME=VALUE, got '" + item + "'");
        const auto v = parse_variable(item.substr(0, eq));
        if (!v || !is_pollutant(*v)) throw ValidationError("unknown pollutant '" + item.substr(0, eq) + "'");
        try {
            std::size_t used = 0;
            const std::string num = item.substr(eq + 1);
            x[*v] = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::logic_error&) {
            throw ValidationError("bad number in '" + item + "'");
        }
        seen[index(*v)] = true;
    }
    for (Variable p : kPollutants) {
        if (!seen[index(p)]) throw ValidationError("missing value for " + std::string(name(p)));
    }
    return x;
}

std::array<rules::Range, kPollutantCount> full_ranges(const it2::ParameterTable& table) {
    std::array<rules::Range, kPollutantCount> out;
    for (Variable p : kPollutants) out[index(p)] = {0.0, table.at(p, table.top_term(p)).umf.d};
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval type-2 fuzzy air quality assessment with rule-based reasoning", "aqi"};
    app.require_subcommand(1);
    cli::OutputSet outputs;
    std::function<void()> action;

    // preprocess
    std::string pre_in, pre_out, pre_stats, pre_stats_json, pre_scope = "global";
    auto* pre = app.add_subcommand("preprocess", "Drop unlabeled rows and impute missing values");
    pre->add_option("--in", pre_in, "CPCB-style CSV")->required();
    pre->add_option("--out", pre_out, "Cleaned CSV")->required();
    pre->add_option("--stats", pre_stats, "Stats report (text); stdout when omitted");
    pre->add_option("--stats-json", pre_stats_json, "Stats report (JSON)");
    pre->add_option("--impute", pre_scope, "Median scope")->check(CLI::IsMember({"global", "station"}));
    pre->callback([&] {
        action = [&] {
            const auto loaded = ingest::load_csv(pre_in);
            for (const auto& issue : loaded.issues) {
                std::cerr << "warning: line " << issue.line << " " << issue.column << ": " << issue.reason
                          << (issue.value.empty() ? "" : " ('" + issue.value + "')") << '\n';
            }
            const auto result = ingest::preprocess(
                loaded.records, pre_scope == "station" ? ingest::ImputeScope::Station : ingest::ImputeScope::Global);
            for (const auto& w : ingest::validate_units(result.records, it2::default_parameter_table())) {
                std::cerr << "warning: row " << w.row + 1 << " " << name(w.pollutant) << " = "
                          << format_number(w.value) << " exceeds " << format_number(w.bound)
                          << "; check units\n";
            }
            outputs.add(pre_out, ingest::write_clean_csv(result.records));
            emit(outputs, pre_stats, ingest::stats_text(result.stats));
            if (!pre_stats_json.empty()) outputs.add(pre_stats_json, ingest::stats_json(result.stats));
        };
    });

    // weights
    std::string w_matrix, w_out;
    double w_max_cr = fahp::kDefaultConsistencyThreshold;
    auto* wcmd = app.add_subcommand("weights", "Pollutant weights from the pairwise comparison matrix");
    wcmd->add_option("--matrix", w_matrix, "Comparison matrix file (default: bundled)");
    wcmd->add_option("--max-cr", w_max_cr, "Consistency ratio threshold");
    wcmd->add_option("--out", w_out, "Report file; stdout when omitted");
    wcmd->callback([&] {
        action = [&] {
            const auto m = cli::load_matrix(opt_path(w_matrix));
            const auto r = fahp::compute_weights(m.matrix, m.criteria, w_max_cr);
            emit(outputs, w_out, cli::weights_report(m, r));
        };
    });

    // params
    std::string p_out;
    auto* params = app.add_subcommand("params", "Membership parameter table");
    auto* pexport = params->add_subcommand("export", "Write the bundled parameter table");
    pexport->add_option("--out", p_out, "Output file; stdout when omitted");
    params->require_subcommand(1);
    pexport->callback([&] {
        action = [&] { emit(outputs, p_out, std::string(it2::default_parameter_text())); };
    });

    // rules
    std::string r_in, r_params, r_out;
    auto* rcmd = app.add_subcommand("rules", "Fuzzy rule base");
    auto* rgen = rcmd->add_subcommand("generate", "Generate rules from observed ranges");
    rgen->add_option("--in", r_in, "Cleaned CSV (all terms when omitted)");
    rgen->add_option("--params", r_params, "Parameter table");
    rgen->add_option("--out", r_out, "Output file; stdout when omitted");
    rcmd->require_subcommand(1);
    rgen->callback([&] {
        action = [&] {
            const auto table = cli::load_params(opt_path(r_params));
            const auto ranges = r_in.empty()
                                    ? full_ranges(table)
                                    : ingest::observed_ranges(
                                          ingest::preprocess(ingest::load_csv(r_in).records).records);
            emit(outputs, r_out, rules::emit_rules(rules::generate_rules(ranges, table)));
        };
    });

    // assess
    std::string a_in, a_point, a_params, a_matrix, a_rules, a_policy = "driver", a_out, a_triples;
    bool a_no_saturate = false;
    auto* acmd = app.add_subcommand("assess", "Weighted IT2 fuzzy AQI assessment");
    auto* a_in_opt = acmd->add_option("--in", a_in, "CSV of observations (preprocessed on load)");
    auto* a_point_opt = acmd->add_option("--point", a_point, "One input: PM2.5=..,PM10=..,CO=..,O3=..,NO2=..,SO2=..,NH3=..");
    a_in_opt->excludes(a_point_opt);
    acmd->add_option("--params", a_params, "Parameter table");
    acmd->add_option("--matrix", a_matrix, "Comparison matrix");
    acmd->add_option("--rules", a_rules, "Rule file (generated from the data when omitted)");
    acmd->add_option("--policy", a_policy, "Rule weight policy")->check(CLI::IsMember({"driver", "global-max"}));
    acmd->add_flag("--no-saturate", a_no_saturate, "Do not extend the top term beyond its support");
    acmd->add_option("--out", a_out, "Assessed CSV; stdout when omitted");
    acmd->add_option("--triples", a_triples, "Also write observation triples");
    acmd->callback([&] {
        action = [&] {
            if (a_in.empty() && a_point.empty()) throw CLI::RequiredError("--in or --point");
            const auto table = cli::load_params(opt_path(a_params));
            const auto m = cli::load_matrix(opt_path(a_matrix));
            const auto w = fahp::compute_weights(m.matrix, m.criteria);
            inference::InferenceOptions opts;
            opts.policy = a_policy == "driver" ? inference::WeightPolicy::Driver : inference::WeightPolicy::GlobalMax;
            opts.saturate_top = !a_no_saturate;

            std::vector<ingest::CleanRecord> records;
            if (!a_in.empty()) {
                records = ingest::preprocess(ingest::load_csv(a_in).records).records;
            } else {
                ingest::CleanRecord r;
                r.station = "input";
                r.concentration = parse_point(a_point);
                records.push_back(r);
            }
            const auto rb = !a_rules.empty() ? rules::parse_rules(cli::read_file(a_rules))
                            : !a_in.empty()  ? rules::generate_rules(ingest::observed_ranges(records), table)
                                             : rules::generate_rules(full_ranges(table), table);
            const inference::Engine engine(table, rb, fahp::pollutant_weights(w.weights), opts);
            const auto rows = cli::assess_records(records, engine);
            if (!a_point.empty()) {
                const auto& a = rows.front().assessment;
                std::ostringstream s;
                s << "AQI_L    " << format_fixed(a.interval.aqi_l, 3) << '\n'
                  << "AQI_R    " << format_fixed(a.interval.aqi_r, 3) << '\n'
                  << "AQI      " << format_fixed(a.interval.aqi, 3) << '\n'
                  << "category " << name(a.category) << '\n'
                  << "fired    " << a.fired_rules << '\n';
                emit(outputs, a_out, s.str());
            } else {
                emit(outputs, a_out, cli::assessed_csv(rows));
            }
            if (!a_triples.empty()) {
                kg::TripleStore store;
                store.add_all(cli::rows_to_triples(rows));
                outputs.add(a_triples, kg::serialize(store));
            }
        };
    });

    // reason
    std::string rs_triples, rs_rules, rs_out;
    std::size_t rs_max_iter = 1000;
    auto* rscmd = app.add_subcommand("reason", "Forward-chain Horn rules to a fixpoint");
    rscmd->add_option("--triples", rs_triples, "Input triples")->required();
    rscmd->add_option("--rules", rs_rules, "Rule file (default: bundled)");
    rscmd->add_option("--out", rs_out, "Output triples; stdout when omitted");
    rscmd->add_option("--max-iterations", rs_max_iter, "Safety cap on passes");
    rscmd->callback([&] {
        action = [&] {
            kg::TripleStore store;
            store.add_all(kg::parse_triples(cli::read_file(rs_triples)));
            const auto rules = kg::parse_rules(rs_rules.empty() ? std::string(resources::reasoning_rules())
                                                                : cli::read_file(rs_rules));
            const auto stats = kg::materialize(store, rules, rs_max_iter);
            std::cerr << stats.inferred << " triples inferred in " << stats.iterations << " passes\n";
            emit(outputs, rs_out, kg::serialize(store));
        };
    });

    // query
    std::string q_triples, q_query, q_dl, q_rules;
    auto* qcmd = app.add_subcommand("query", "Run a SELECT query or a class expression");
    qcmd->add_option("--triples", q_triples, "Triples (already reasoned, or see --rules)")->required();
    auto* q_query_opt = qcmd->add_option("--query", q_query, "SELECT query file");
    auto* q_dl_opt = qcmd->add_option("--dl", q_dl, "Class expression file");
    q_query_opt->excludes(q_dl_opt);
    qcmd->add_option("--rules", q_rules, "Materialize these rules first");
    qcmd->callback([&] {
        action = [&] {
            if (q_query.empty() && q_dl.empty()) throw CLI::RequiredError("--query or --dl");
            kg::TripleStore store;
            store.add_all(kg::parse_triples(cli::read_file(q_triples)));
            if (!q_rules.empty()) kg::materialize(store, kg::parse_rules(cli::read_file(q_rules)));
            if (!q_query.empty()) {
                std::cout << kg::format_table(kg::execute_query(store, kg::parse_query(cli::read_file(q_query))));
            } else {
                for (const auto& t : kg::dl_membership(store, kg::parse_dl_query(cli::read_file(q_dl)))) {
                    std::cout << kg::to_string(t) << '\n';
                }
            }
        };
    });

    // counts
    std::string c_schema, c_triples, c_json;
    auto* ccmd = app.add_subcommand("counts", "Ontology metrics of a schema and triples");
    ccmd->add_option("--schema", c_schema, "Schema declaration file")->required();
    ccmd->add_option("--triples", c_triples, "Triples whose individuals are counted too");
    ccmd->add_option("--json", c_json, "Also write the counts as JSON");
    ccmd->callback([&] {
        action = [&] {
            kg::TripleStore store;
            if (!c_triples.empty()) store.add_all(kg::parse_triples(cli::read_file(c_triples)));
            const auto c = kg::ontology_counts(kg::parse_schema(cli::read_file(c_schema)), store);
            std::cout << "classes            " << c.classes << '\n'
                      << "object properties  " << c.object_properties << '\n'
                      << "data properties    " << c.data_properties << '\n'
                      << "individuals        " << c.individuals << '\n'
                      << "subclass axioms    " << c.subclass_axioms << '\n'
                      << "logical axioms     " << c.logical_axioms << '\n';
            if (!c_json.empty()) {
                nlohmann::ordered_json j{{"classes", c.classes},
                                         {"object_properties", c.object_properties},
                                         {"data_properties", c.data_properties},
                                         {"individuals", c.individuals},
                                         {"subclass_axioms", c.subclass_axioms},
                                         {"logical_axioms", c.logical_axioms}};
                outputs.add(c_json, j.dump(2) + "\n");
            }
        };
    });

    // eval
    std::string e_pred, e_actual, e_boundary = "Moderate", e_json;
    std::size_t e_sample = 0;
    std::uint64_t e_seed = 42;
    auto* ecmd = app.add_subcommand("eval", "Classification and error metrics");
    ecmd->add_option("--pred", e_pred, "Predictions (CSV with a Category column)");
    ecmd->add_option("--actual", e_actual, "Ground truth (CSV with AQI_Bucket or Actual); defaults to --pred");
    ecmd->add_option("--sample", e_sample, "Evaluate a seeded random subset of this size");
    ecmd->add_option("--seed", e_seed, "Sampling seed");
    ecmd->add_option("--unhealthy-from", e_boundary, "First category counted as unhealthy");
    ecmd->add_option("--json", e_json, "Also write the metrics as JSON");

    std::string s_counts;
    double s_classes = -1, s_subclass = -1, s_relations = -1, s_properties = -1, s_individuals = -1;
    auto* scmd = ecmd->add_subcommand("scores", "Ontology model and knowledge base scores");
    scmd->add_option("--counts", s_counts, "JSON written by `counts --json`");
    scmd->add_option("--classes", s_classes);
    scmd->add_option("--subclass", s_subclass);
    scmd->add_option("--relations", s_relations, "Object properties");
    scmd->add_option("--properties", s_properties, "Data properties");
    scmd->add_option("--individuals", s_individuals);
    scmd->callback([&] {
        action = [&] {
            eval::OntologyScoreInput in;
            if (!s_counts.empty()) {
                const auto j = nlohmann::json::parse(cli::read_file(s_counts), nullptr, false);
                if (j.is_discarded() || !j.is_object()) throw ParseError(s_counts + ": not a JSON object");
                auto get = [&](const char* key) {
                    if (!j.contains(key) || !j[key].is_number()) {
                        throw ParseError(s_counts + ": missing number '" + key + "'");
                    }
                    return j[key].get<double>();
                };
                in = {get("classes"), get("subclass_axioms"), get("object_properties"), get("data_properties"),
                      get("individuals")};
            }
            if (s_classes >= 0) in.classes = s_classes;
            if (s_subclass >= 0) in.subclass_axioms = s_subclass;
            if (s_relations >= 0) in.relations = s_relations;
            if (s_properties >= 0) in.properties = s_properties;
            if (s_individuals >= 0) in.individuals = s_individuals;
            const auto s = eval::ontology_scores(in);
            std::cout << "score_om " << format_fixed(s.model, 2) << '\n'
                      << "score_kb " << format_fixed(s.knowledge_base, 2) << '\n';
        };
    });
    ecmd->callback([&] {
        if (ecmd->got_subcommand(scmd)) return;
        action = [&] {
            if (e_pred.empty()) throw CLI::RequiredError("--pred");
            const auto boundary = parse_term(e_boundary);
            if (!boundary) throw CLI::ValidationError("--unhealthy-from", "unknown category " + e_boundary);
            auto predicted = read_labels(e_pred, {"Category"});
            auto actual = read_labels(e_actual.empty() ? e_pred : e_actual, {"AQI_Bucket", "Actual"});
            if (predicted.size() != actual.size()) {
                throw ValidationError("prediction and label counts differ: " + std::to_string(predicted.size()) +
                                      " vs " + std::to_string(actual.size()));
            }
            if (e_sample > 0) {
                std::vector<Term> p, a;
                for (std::size_t i : cli::sample_indices(actual.size(), e_sample, e_seed)) {
                    p.push_back(predicted[i]);
                    a.push_back(actual[i]);
                }
                predicted = std::move(p);
                actual = std::move(a);
            }
            const auto m = cli::evaluate(actual, predicted, {*boundary});
            std::cout << cli::metrics_text(m);
            if (!e_json.empty()) outputs.add(e_json, cli::metrics_json(m));
        };
    });

    // demo
    std::string d_out = "demo_out";
    auto* dcmd = app.add_subcommand("demo", "Full pipeline on the bundled sample");
    dcmd->add_option("--out", d_out, "Artifact directory");
    dcmd->callback([&] {
        action = [&] {
            const auto artifacts = cli::run_demo();
            for (const auto& [file, content] : artifacts) outputs.add(fs::path(d_out) / file, content);
            std::cout << artifacts.at("summary.txt") << "query 2:\n" << artifacts.at("query2.tsv");
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (action) action();
        outputs.commit();
    } catch (const CLI::Error& e) {
        std::cerr << "aqi: " << e.what() << '\n' << app.help();
        return kUsage;
    } catch (const ConsistencyError& e) {
        std::cerr << "aqi: " << e.what() << '\n';
        return kFailure;
    } catch (const InferenceError& e) {
        std::cerr << "aqi: " << e.what() << '\n';
        return kFailure;
    } catch (const Error& e) {
        std::cerr << "aqi: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "aqi: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}
