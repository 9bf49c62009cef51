#include "doctest.h"

#include <cmath>

#include "aqi/it2core.hpp"

using namespace aqi;
using namespace aqi::it2;

namespace {

// Straight-line membership written out independently of eval().
double ramp_oracle(double a, double b, double c, double d, double h, double x) {
    if (x >= b && x <= c) return h;
    if (x > a && x < b) return h * (x - a) / (b - a);
    if (x > c && x < d) return h * (d - x) / (d - c);
    return 0.0;
}

}  // namespace

TEST_CASE("trapezoid evaluation") {
    const Trapezoid t{10, 20, 30, 40, 0.8};
    CHECK(eval(t, 5) == 0.0);
    CHECK(eval(t, 10) == 0.0);
    CHECK(eval(t, 15) == doctest::Approx(0.4));
    CHECK(eval(t, 20) == 0.8);
    CHECK(eval(t, 30) == 0.8);
    CHECK(eval(t, 35) == doctest::Approx(0.4));
    CHECK(eval(t, 40) == 0.0);
    CHECK(eval(t, 1e6) == 0.0);
    CHECK_THROWS_AS(eval(t, NAN), ValidationError);

    // Left shoulder: a == b, so the plateau starts at the origin.
    const Trapezoid left{0, 0, 15, 30, 1};
    CHECK(eval(left, 0) == 1.0);
    CHECK(eval(left, 22.5) == 0.5);
    // Triangle.
    const Trapezoid tri{30, 60, 60, 90, 1};
    CHECK(eval(tri, 60) == 1.0);
    CHECK(eval(tri, 45) == 0.5);
}

TEST_CASE("trapezoid validation") {
    CHECK_NOTHROW(validate(Trapezoid{0, 0, 0, 0, 1}));
    CHECK_THROWS_AS(validate(Trapezoid{2, 1, 3, 4, 1}), ValidationError);
    CHECK_THROWS_AS(validate(Trapezoid{0, 1, 2, 3, 0}), ValidationError);
    CHECK_THROWS_AS(validate(Trapezoid{0, 1, 2, 3, 1.5}), ValidationError);
    CHECK_THROWS_AS(validate(Trapezoid{0, 1, 2, INFINITY, 1}), ValidationError);

    IT2TrapezoidSet bad{Term::Good, {0, 1, 2, 3, 0.8}, {0, 1, 2, 3, 1.0}};
    CHECK_THROWS_AS(validate(bad), ValidationError);
    IT2TrapezoidSet wide{Term::Good, {1, 2, 3, 4, 1}, {0, 2, 3, 4, 0.8}};
    CHECK_THROWS_AS(validate(wide), ValidationError);
}

TEST_CASE("saturation holds the plateau beyond the support") {
    const auto& table = default_parameter_table();
    const auto& severe = table.at(Variable::PM25, Term::Severe);
    CHECK(membership_interval(severe, 700).hi == 0.0);
    const auto mu = membership_interval(severe, 700, true);
    CHECK(mu.hi == 1.0);
    CHECK(mu.lo == 0.8);
    CHECK_THROWS_AS(membership_interval(severe, -1), ValidationError);
}

TEST_CASE("default table spot values") {
    const auto& table = default_parameter_table();
    const auto& good = table.at(Variable::PM25, Term::Good);
    const auto a = membership_interval(good, 22.5);
    CHECK(std::abs(a.lo - 0.24) <= 1e-12);
    CHECK(std::abs(a.hi - 0.5) <= 1e-12);
    const auto b = membership_interval(good, 10);
    CHECK(std::abs(b.lo - 0.8) <= 1e-12);
    CHECK(std::abs(b.hi - 1.0) <= 1e-12);
}

TEST_CASE("default table transcription") {
    const auto& table = default_parameter_table();
    CHECK(table.at(Variable::PM25, Term::Good).umf == Trapezoid{0, 0, 15, 30, 1});
    CHECK(table.at(Variable::PM25, Term::Good).lmf == Trapezoid{0, 0, 12, 27, 0.8});
    CHECK(table.at(Variable::CO, Term::Good).umf == Trapezoid{0, 0, 0.5, 1.5, 1});
    CHECK(table.at(Variable::CO, Term::Good).lmf == Trapezoid{0, 0, 0.1, 1.1, 0.8});
    CHECK(table.at(Variable::PM10, Term::Moderate).umf == Trapezoid{75, 175, 175, 296, 1});
    CHECK(table.at(Variable::AQI, Term::Severe).umf == Trapezoid{400, 500, 600, 600, 1});
    for (Variable v : kVariables) {
        CHECK(table.terms(v).size() == kTermCount);
        CHECK(table.top_term(v) == Term::Severe);
    }
}

TEST_CASE("every default set keeps its LMF under its UMF") {
    const auto& table = default_parameter_table();
    for (Variable v : kVariables) {
        for (Term t : table.terms(v)) {
            const auto& s = table.at(v, t);
            CAPTURE(name(v));
            CAPTURE(name(t));
            CHECK(fou_contained(s, 10001));
            // Independent grid check with the oracle.
            const auto& u = s.umf;
            const auto& l = s.lmf;
            bool ok = true;
            for (int i = 0; i <= 10000; ++i) {
                const double x = u.a + (u.d - u.a) * i / 10000.0;
                const double lo = ramp_oracle(l.a, l.b, l.c, l.d, l.h, x);
                const double hi = ramp_oracle(u.a, u.b, u.c, u.d, u.h, x);
                ok = ok && lo <= hi + 1e-12;
                ok = ok && std::abs(eval(u, x) - hi) <= 1e-12 && std::abs(eval(l, x) - lo) <= 1e-12;
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("fou_contained detects a crossing") {
    // LMF wider on the right than the UMF ramp allows.
    IT2TrapezoidSet s{Term::Good, {0, 10, 10, 20, 1}, {0, 10, 10, 20, 1}};
    s.lmf = {5, 10, 14, 20, 0.8};
    CHECK_FALSE(fou_contained(s));
}

TEST_CASE("parameter table text round-trips") {
    const auto& table = default_parameter_table();
    const auto text = serialize_parameter_table(table);
    CHECK(load_parameter_table(text) == table);
}

TEST_CASE("parameter table errors") {
    SUBCASE("syntax error has a location") {
        try {
            load_parameter_table("[\"PM2.5\".Good]\numf = [0, 0, 15 30, 1]\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() > 0);
        }
    }
    SUBCASE("invariant error names the set") {
        try {
            load_parameter_table("[\"PM2.5\".Good]\numf = [0, 0, 15, 30, 1]\nlmf = [0, 0, 12, 40, 0.8]\n");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("PM2.5") != std::string::npos);
        }
    }
    SUBCASE("unknown variable") {
        CHECK_THROWS_AS(load_parameter_table("[\"PM1\".Good]\numf = [0, 0, 1, 2, 1]\nlmf = [0, 0, 1, 2, 0.8]\n"),
                        ParseError);
    }
}
