#include "doctest.h"

#include <algorithm>
#include <random>

#include "aqi/ingest.hpp"
#include "aqi/resources.hpp"

using namespace aqi;
using namespace aqi::ingest;

namespace {

double sorted_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

const char* kHeader = "StationId,Date,PM2.5,PM10,NO2,NH3,CO,SO2,O3,AQI,AQI_Bucket\n";

}  // namespace

TEST_CASE("median matches a sort-based oracle") {
    CHECK(median({3.0}) == 3.0);
    CHECK(median({4.0, 1.0}) == 2.5);
    CHECK_THROWS_AS(median({}), ValidationError);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 500);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(1 + trial % 37);
        for (auto& x : v) x = trial % 3 ? u(rng) : std::floor(u(rng) / 50);  // some ties
        CHECK(median(v) == sorted_median(v));
    }
}

TEST_CASE("parse the bundled sample") {
    const auto r = parse_csv(resources::demo_sample());
    CHECK(r.records.size() == 50);
    CHECK(r.columns.station_column == "StationId");
    CHECK(r.columns.ignored.empty());
    CHECK(r.issues.empty());
    const auto& first = r.records.front();
    CHECK(first.station == "BR006");
    CHECK(first.concentration[index(Variable::PM10)] == 480.0);
    CHECK(first.bucket == Term::Severe);
}

TEST_CASE("missing mandatory columns") {
    try {
        parse_csv("StationId,Date,PM2.5\nA,2020-01-01,3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("AQI_Bucket") != std::string::npos);
        CHECK(msg.find("NH3") != std::string::npos);
        CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(parse_csv(""), ParseError);
}

TEST_CASE("malformed cells become issues and count as missing") {
    const std::string text = std::string("\xEF\xBB\xBF") + kHeader +
                             "A,d1,abc,10,10,10,1,10,10,50,Good\n"
                             "A,d2,-4,10,10,10,1,10,10,50,Good\n"
                             "A,d3,5,10,10,10,1,10,10,50,Awful\n"
                             ",d4,5,10,10,10,1,10,10,50,Good\n";
    const auto r = parse_csv(text);
    CHECK(r.columns.station_column == "StationId");  // BOM stripped
    REQUIRE(r.records.size() == 3);
    REQUIRE(r.issues.size() == 4);
    CHECK(r.issues[0].line == 2);
    CHECK(r.issues[0].column == "PM2.5");
    CHECK(r.issues[0].reason == "not a number");
    CHECK(r.issues[1].reason == "negative value");
    CHECK(!r.records[0].concentration[index(Variable::PM25)]);
    CHECK(!r.records[1].concentration[index(Variable::PM25)]);
    CHECK(!r.records[2].bucket);
}

TEST_CASE("city column and extra columns") {
    const auto r = parse_csv(
        "City,Date,PM2.5,PM10,NO,NO2,NOx,NH3,CO,SO2,O3,Benzene,AQI,AQI_Bucket\n"
        "Delhi,2020-01-01,1,2,3,4,5,6,7,8,9,10,11,Good\n");
    CHECK(r.columns.station_column == "City");
    CHECK(r.columns.ignored == std::vector<std::string>{"NO", "NOx", "Benzene"});
    CHECK(r.records[0].concentration[index(Variable::NO2)] == 4.0);
}

TEST_CASE("unlabeled rows are dropped before imputing") {
    // The unlabeled row holds the only extreme value; it must not move the median.
    const std::string text = std::string(kHeader) +
                             "A,d1,10,10,10,10,1,10,10,50,Good\n"
                             "A,d2,20,,10,10,1,10,10,50,Good\n"
                             "A,d3,30,30,10,10,1,10,10,50,Good\n"
                             "A,d4,999,999,10,10,1,10,10,,\n";
    const auto pre = preprocess(parse_csv(text).records);
    CHECK(pre.stats.rows_in == 4);
    CHECK(pre.stats.rows_dropped == 1);
    CHECK(pre.stats.rows_kept == 3);
    CHECK(pre.stats.medians[index(Variable::PM10)] == 20.0);
    CHECK(pre.records[1].concentration[Variable::PM10] == 20.0);
    CHECK(pre.stats.missing_before[index(Variable::PM10)] == 1);
    CHECK(pre.stats.missing_after[index(Variable::PM10)] == 0);
}

TEST_CASE("preprocessing is idempotent") {
    const auto first = preprocess(parse_csv(resources::demo_sample()).records);
    CHECK(first.stats.rows_dropped == 2);
    const auto csv = write_clean_csv(first.records);
    const auto second = preprocess(parse_csv(csv).records);
    CHECK(second.stats.rows_dropped == 0);
    CHECK(write_clean_csv(second.records) == csv);
}

TEST_CASE("station scope falls back to the global median") {
    const std::string text = std::string(kHeader) +
                             "A,d1,10,10,10,10,1,10,10,50,Good\n"
                             "A,d2,,10,10,10,1,10,10,50,Good\n"
                             "A,d3,30,10,10,10,1,10,10,50,Good\n"
                             "B,d1,100,10,10,10,1,10,10,50,Good\n"
                             "C,d1,,10,10,10,1,10,10,50,Good\n";
    const auto rows = parse_csv(text).records;
    const auto station = preprocess(rows, ImputeScope::Station);
    CHECK(station.stats.scope == ImputeScope::Station);
    CHECK(station.records[1].concentration[Variable::PM25] == 20.0);
    CHECK(station.records[4].concentration[Variable::PM25] == 30.0);  // C has none: global median
    const auto global = preprocess(rows);
    CHECK(global.records[1].concentration[Variable::PM25] == 30.0);
}

TEST_CASE("a column with no values cannot be imputed") {
    const std::string text = std::string(kHeader) + "A,d1,,10,10,10,1,10,10,50,Good\n";
    CHECK_THROWS_AS(preprocess(parse_csv(text).records), ValidationError);
}

TEST_CASE("unit warnings flag but keep outliers") {
    const auto& table = it2::default_parameter_table();
    CleanRecord r;
    r.station = "A";
    r.concentration[Variable::CO] = 5000;  // mg/m3 reported as ug/m3
    const std::vector<CleanRecord> rows = {r};
    const auto w = validate_units(rows, table);
    REQUIRE(w.size() == 1);
    CHECK(w[0].pollutant == Variable::CO);
    CHECK(w[0].value == 5000);
}

TEST_CASE("observed ranges and stats output") {
    const auto pre = preprocess(parse_csv(resources::demo_sample()).records);
    const auto ranges = observed_ranges(pre.records);
    for (Variable p : kPollutants) {
        double lo = 1e300, hi = -1e300;
        for (const auto& r : pre.records) {
            lo = std::min(lo, r.concentration[p]);
            hi = std::max(hi, r.concentration[p]);
        }
        CHECK(ranges[index(p)].min == lo);
        CHECK(ranges[index(p)].max == hi);
    }
    CHECK(stats_text(pre.stats).find("rows in:      50") != std::string::npos);
    CHECK(stats_json(pre.stats).find("\"rows_kept\": 48") != std::string::npos);
}
