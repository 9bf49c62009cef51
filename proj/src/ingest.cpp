#include "aqi/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace aqi::ingest {

namespace {

// Splits one CSV line, honouring double quotes.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    out.push_back(std::move(cell));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

enum class Role { Station, Date, Pollutant, Aqi, Bucket, Ignored };

struct Column {
    Role role = Role::Ignored;
    Variable pollutant = Variable::PM25;
    std::string header;
};

Column classify(std::string_view header) {
    const std::string h(trim(header));
    if (h == "StationId" || h == "City") return {Role::Station, Variable::PM25, h};
    if (h == "Date" || h == "Datetime") return {Role::Date, Variable::PM25, h};
    if (h == "AQI") return {Role::Aqi, Variable::AQI, h};
    if (h == "AQI_Bucket") return {Role::Bucket, Variable::AQI, h};
    if (const auto v = parse_variable(h); v && is_pollutant(*v)) return {Role::Pollutant, *v, h};
    return {Role::Ignored, Variable::PM25, h};
}

// Column order used for every CSV this module writes.
constexpr std::array<Variable, kPollutantCount> kCsvOrder = {
    Variable::PM25, Variable::PM10, Variable::NO2, Variable::NH3,
    Variable::CO,   Variable::SO2,  Variable::O3};

}  // namespace

LoadResult parse_csv(std::string_view text) {
    LoadResult out;
    std::vector<Column> columns;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool have_header = false;
    bool saw_station = false;
    bool saw_bucket = false;
    std::array<bool, kPollutantCount> saw_pollutant{};

    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);

        if (!have_header) {
            have_header = true;
            if (!cells.empty() && cells[0].starts_with("\xEF\xBB\xBF")) cells[0].erase(0, 3);
            for (const auto& c : cells) {
                Column col = classify(c);
                if (col.role == Role::Station) {
                    if (saw_station) col.role = Role::Ignored;
                    else {
                        saw_station = true;
                        out.columns.station_column = col.header;
                    }
                }
                if (col.role == Role::Bucket) saw_bucket = true;
                if (col.role == Role::Pollutant) saw_pollutant[index(col.pollutant)] = true;
                (col.role == Role::Ignored ? out.columns.ignored : out.columns.recognized)
                    .push_back(col.header);
                columns.push_back(std::move(col));
            }
            std::vector<std::string> missing;
            if (!saw_station) missing.emplace_back("StationId");
            if (!saw_bucket) missing.emplace_back("AQI_Bucket");
            for (Variable p : kPollutants) {
                if (!saw_pollutant[index(p)]) missing.emplace_back(name(p));
            }
            if (!missing.empty()) {
                std::string msg = "missing mandatory column(s):";
                for (const auto& m : missing) msg += " " + m;
                throw ParseError(msg, line_no, 1);
            }
            continue;
        }

        RawRecord rec;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const std::string_view cell = i < cells.size() ? trim(cells[i]) : std::string_view{};
            const Column& col = columns[i];
            auto issue = [&](std::string reason) {
                out.issues.push_back({line_no, col.header, std::string(cell), std::move(reason)});
            };
            switch (col.role) {
                case Role::Station:
                    rec.station = cell;
                    break;
                case Role::Date:
                    rec.date = cell;
                    break;
                case Role::Pollutant:
                case Role::Aqi: {
                    if (cell.empty()) break;
                    const auto v = parse_double(cell);
                    if (!v) {
                        issue("not a number");
                        break;
                    }
                    if (*v < 0.0) {
                        issue("negative value");
                        break;
                    }
                    if (col.role == Role::Aqi) rec.aqi = v;
                    else rec.concentration[index(col.pollutant)] = v;
                    break;
                }
                case Role::Bucket: {
                    if (cell.empty()) break;
                    const auto t = parse_term(cell);
                    if (!t) issue("unknown AQI bucket");
                    else rec.bucket = t;
                    break;
                }
                case Role::Ignored:
                    break;
            }
        }
        if (rec.station.empty()) {
            out.issues.push_back({line_no, out.columns.station_column, "", "empty station id; row skipped"});
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    if (!have_header) throw ParseError("CSV input has no header row");
    return out;
}

LoadResult load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

double median(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

Preprocessed preprocess(const std::vector<RawRecord>& records, ImputeScope scope) {
    if (records.empty()) throw ValidationError("no records to preprocess");
    Preprocessed out;
    out.stats.rows_in = records.size();
    out.stats.scope = scope;

    std::vector<const RawRecord*> kept;
    kept.reserve(records.size());
    for (const auto& r : records) {
        if (r.bucket) kept.push_back(&r);
    }
    out.stats.rows_kept = kept.size();
    out.stats.rows_dropped = records.size() - kept.size();
    if (kept.empty()) throw ValidationError("every record lacks an AQI label");

    std::map<std::string, std::array<std::vector<double>, kPollutantCount>> by_station;
    std::array<std::vector<double>, kPollutantCount> columns;
    for (const auto* r : kept) {
        for (Variable p : kPollutants) {
            const auto& v = r->concentration[index(p)];
            if (v) {
                columns[index(p)].push_back(*v);
                if (scope == ImputeScope::Station) by_station[r->station][index(p)].push_back(*v);
            } else {
                ++out.stats.missing_before[index(p)];
            }
        }
    }
    for (Variable p : kPollutants) {
        if (columns[index(p)].empty()) {
            throw ValidationError("column " + std::string(name(p)) + " has no values; median undefined");
        }
        out.stats.medians[index(p)] = median(columns[index(p)]);
    }

    std::map<std::string, std::array<std::optional<double>, kPollutantCount>> station_medians;
    if (scope == ImputeScope::Station) {
        for (auto& [station, cols] : by_station) {
            auto& m = station_medians[station];
            for (Variable p : kPollutants) {
                if (!cols[index(p)].empty()) m[index(p)] = median(std::move(cols[index(p)]));
            }
        }
    }

    out.records.reserve(kept.size());
    for (const auto* r : kept) {
        CleanRecord c;
        c.station = r->station;
        c.date = r->date;
        c.aqi = r->aqi;
        c.bucket = *r->bucket;
        for (Variable p : kPollutants) {
            const auto& v = r->concentration[index(p)];
            if (v) {
                c.concentration[p] = *v;
                continue;
            }
            double fill = out.stats.medians[index(p)];
            if (scope == ImputeScope::Station) {
                const auto it = station_medians.find(r->station);
                if (it != station_medians.end() && it->second[index(p)]) fill = *it->second[index(p)];
            }
            c.concentration[p] = fill;
        }
        out.records.push_back(std::move(c));
    }
    // Every gap is filled above; missing_after stays zero.
    return out;
}

std::vector<UnitWarning> validate_units(const std::vector<CleanRecord>& records,
                                        const it2::ParameterTable& table) {
    std::array<double, kPollutantCount> bounds{};
    for (Variable p : kPollutants) bounds[index(p)] = 1.5 * table.at(p, table.top_term(p)).umf.d;
    std::vector<UnitWarning> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (Variable p : kPollutants) {
            const double v = records[i].concentration[p];
            if (v < 0.0 || v > bounds[index(p)]) out.push_back({i, p, v, bounds[index(p)]});
        }
    }
    return out;
}

std::string write_clean_csv(const std::vector<CleanRecord>& records) {
    std::ostringstream out;
    out << "StationId,Date";
    for (Variable p : kCsvOrder) out << ',' << name(p);
    out << ",AQI,AQI_Bucket\n";
    for (const auto& r : records) {
        out << r.station << ',' << r.date;
        for (Variable p : kCsvOrder) out << ',' << format_number(r.concentration[p]);
        out << ',' << (r.aqi ? format_number(*r.aqi) : std::string()) << ',' << name(r.bucket) << '\n';
    }
    return out.str();
}

std::string stats_text(const DatasetStats& s) {
    std::ostringstream out;
    out << "rows in:      " << s.rows_in << '\n'
        << "rows dropped: " << s.rows_dropped << " (missing AQI_Bucket)\n"
        << "rows kept:    " << s.rows_kept << '\n'
        << "imputation:   median, " << (s.scope == ImputeScope::Global ? "global" : "per station") << '\n'
        << "pollutant  missing  availability  median\n";
    for (Variable p : kCsvOrder) {
        const std::size_t miss = s.missing_before[index(p)];
        const double avail = s.rows_kept == 0 ? 0.0
                                               : 100.0 * static_cast<double>(s.rows_kept - miss) /
                                                     static_cast<double>(s.rows_kept);
        std::string label(name(p));
        label.resize(11, ' ');
        std::string count = std::to_string(miss);
        count.resize(9, ' ');
        std::string pct = format_fixed(avail, 2) + "%";
        pct.resize(14, ' ');
        out << label << count << pct << format_number(s.medians[index(p)]) << '\n';
    }
    return out.str();
}

std::string stats_json(const DatasetStats& s) {
    nlohmann::ordered_json j;
    j["rows_in"] = s.rows_in;
    j["rows_dropped"] = s.rows_dropped;
    j["rows_kept"] = s.rows_kept;
    j["impute_scope"] = s.scope == ImputeScope::Global ? "global" : "station";
    for (Variable p : kCsvOrder) {
        const std::string key(name(p));
        j["medians"][key] = s.medians[index(p)];
        j["missing_before"][key] = s.missing_before[index(p)];
        j["missing_after"][key] = s.missing_after[index(p)];
    }
    return j.dump(2) + "\n";
}

std::array<rules::Range, kPollutantCount> observed_ranges(const std::vector<CleanRecord>& records) {
    if (records.empty()) throw ValidationError("no records to derive observed ranges from");
    std::array<rules::Range, kPollutantCount> out;
    for (Variable p : kPollutants) {
        out[index(p)] = {records.front().concentration[p], records.front().concentration[p]};
    }
    for (const auto& r : records) {
        for (Variable p : kPollutants) {
            auto& range = out[index(p)];
            range.min = std::min(range.min, r.concentration[p]);
            range.max = std::max(range.max, r.concentration[p]);
        }
    }
    return out;
}

}  // namespace aqi::ingest
