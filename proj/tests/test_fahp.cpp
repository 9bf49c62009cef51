#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aqi/fahp.hpp"

using namespace aqi;
using namespace aqi::fahp;

namespace {

struct Trap {
    double a, b, c, d, h;
};

// Importance scale as printed, with the dropped decimal points restored.
const std::array<std::pair<Trap, Trap>, 8> kPrinted = {{
    {{1, 1, 1, 1, 1}, {1, 1, 1, 1, 0.8}},
    {{1, 2, 3, 4, 1}, {1.4, 2.4, 2.6, 3.6, 0.8}},
    {{2, 3, 4, 5, 1}, {2.4, 3.4, 3.6, 4.6, 0.8}},
    {{3, 4, 5, 6, 1}, {3.4, 4.4, 4.6, 5.6, 0.8}},
    {{4, 5, 6, 7, 1}, {4.4, 5.4, 5.6, 6.6, 0.8}},
    {{5, 6, 7, 8, 1}, {5.4, 6.4, 6.6, 7.6, 0.8}},
    {{6, 7, 8, 9, 1}, {6.4, 7.4, 7.6, 8.6, 0.8}},
    {{7, 8, 9, 9, 1}, {7.4, 8.4, 8.6, 9, 0.8}},
}};

double part(const Trap& t) { return ((t.d - t.a) + (t.h * t.b - t.a) + (t.h * t.c - t.a)) / 4.0 + t.a; }
double defuzz(const Trap& u, const Trap& l) { return (part(u) + part(l)) / 2.0; }
Trap inverse(const Trap& t) { return {1 / t.d, 1 / t.c, 1 / t.b, 1 / t.a, t.h}; }

// Upper triangle of the shipped matrix as scale indices (0 = JE).
const int kUpper[7][7] = {
    {0, 1, 2, 3, 4, 7, 7},
    {0, 0, 3, 4, 5, 7, 7},
    {0, 0, 0, 2, 5, 3, 7},
    {0, 0, 0, 0, 3, 4, 7},
    {0, 0, 0, 0, 0, 1, 2},
    {0, 0, 0, 0, 0, 0, 1},
    {0, 0, 0, 0, 0, 0, 0},
};

// Crisp matrix built directly from the printed scale.
std::vector<double> oracle_crisp() {
    std::vector<double> m(49, 1.0);
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            const auto& [u, l] = kPrinted[kUpper[i][j]];
            m[i * 7 + j] = kUpper[i][j] == 0 ? 1.0 : defuzz(u, l);
            m[j * 7 + i] = kUpper[i][j] == 0 ? 1.0 : defuzz(inverse(u), inverse(l));
        }
    }
    return m;
}

// Principal eigenvalue by repeated squaring of the matrix: the rows of
// A^(2^k) line up with the Perron vector.
double oracle_lambda(const std::vector<double>& a, int n) {
    std::vector<double> p = a;
    for (int k = 0; k < 30; ++k) {
        std::vector<double> q(n * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int r = 0; r < n; ++r) q[i * n + j] += p[i * n + r] * p[r * n + j];
        const double s = *std::max_element(q.begin(), q.end());
        for (auto& x : q) x /= s;
        p = q;
    }
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w[i] += p[i * n + j];
    double lambda = 0.0;
    for (int i = 0; i < n; ++i) {
        double aw = 0.0;
        for (int j = 0; j < n; ++j) aw += a[i * n + j] * w[j];
        lambda += aw / w[i];
    }
    return lambda / n;
}

}  // namespace

TEST_CASE("importance scale matches the printed table") {
    for (std::size_t k = 0; k < kImportanceScale.size(); ++k) {
        const auto j = judgment(kImportanceScale[k]);
        const auto& [u, l] = kPrinted[k];
        CAPTURE(label(kImportanceScale[k]));
        CHECK(j.umf == it2::Trapezoid{u.a, u.b, u.c, u.d, u.h});
        CHECK(j.lmf.a == doctest::Approx(l.a));
        CHECK(j.lmf.b == doctest::Approx(l.b));
        CHECK(j.lmf.c == doctest::Approx(l.c));
        CHECK(j.lmf.d == doctest::Approx(l.d));
        CHECK(j.lmf.h == l.h);
    }
}

TEST_CASE("defuzzification") {
    CHECK(dtrat(judgment(Importance::JE)) == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(dtrat(judgment(Importance::WI)) == doctest::Approx(2.375).epsilon(1e-12));
    for (std::size_t k = 0; k < kImportanceScale.size(); ++k) {
        const auto& [u, l] = kPrinted[k];
        CHECK(dtrat(judgment(kImportanceScale[k])) == doctest::Approx(defuzz(u, l)).epsilon(1e-12));
    }
    CHECK(crisp_value(singleton(1.0)) == 1.0);
    CHECK(crisp_value(judgment(Importance::SI)) == doctest::Approx(dtrat(judgment(Importance::SI))));
}

TEST_CASE("reciprocal reverses the trapezoid") {
    const auto r = reciprocal(judgment(Importance::SI));
    CHECK(r.umf.a == doctest::Approx(1.0 / 6));
    CHECK(r.umf.d == doctest::Approx(1.0 / 3));
    CHECK(r.lmf.h == 0.8);
    CHECK(reciprocal(r) == judgment(Importance::SI));
    it2::Trapezoid zero{0, 1, 2, 3, 1};
    CHECK_THROWS_AS(reciprocal(IT2Judgment{zero, zero}), ValidationError);
}

TEST_CASE("geometric mean of a row") {
    const std::array<IT2Judgment, 2> row = {judgment(Importance::WI), judgment(Importance::SI)};
    const auto g = fuzzy_geometric_mean(row);
    CHECK(g.umf.a == doctest::Approx(std::sqrt(3.0)));
    CHECK(g.umf.d == doctest::Approx(std::sqrt(24.0)));
    CHECK(g.lmf.h == 0.8);
}

TEST_CASE("shipped matrix parses with the printed lower-triangle slips reported") {
    const auto& m = default_matrix();
    REQUIRE(m.criteria.size() == 7);
    CHECK(m.criteria.front() == "PM2.5");
    CHECK(m.warnings.size() == 4);
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            CHECK(m.matrix.at(i, j) == judgment(kImportanceScale[kUpper[i][j]]));
            CHECK(m.matrix.at(j, i) == reciprocal(m.matrix.at(i, j)));
        }
    }
    const auto again = parse_matrix(serialize_matrix(m));
    CHECK(again.criteria == m.criteria);
    CHECK(again.upper_levels == m.upper_levels);
}

TEST_CASE("matrix parse errors") {
    CHECK_THROWS_AS(parse_matrix("A B\nA JE XX\nB - JE\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("A B\nA JE WI\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("A B\nA WI WI\nB - JE\n"), ParseError);
}

TEST_CASE("crisp matrix and consistency agree with the oracle") {
    const auto& m = default_matrix().matrix;
    const auto crisp = m.crisp();
    const auto expected = oracle_crisp();
    for (std::size_t k = 0; k < 49; ++k) CHECK(crisp[k] == doctest::Approx(expected[k]).epsilon(1e-12));
    const auto c = consistency(m);
    const double lambda = oracle_lambda(expected, 7);
    CHECK(c.lambda_max == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(c.ci == doctest::Approx((lambda - 7) / 6).epsilon(1e-9));
    CHECK(c.cr == doctest::Approx((lambda - 7) / 6 / 1.32).epsilon(1e-9));
    CHECK(c.cr < 0.10);
}

TEST_CASE("random index table") {
    CHECK(random_index(1) == 0.0);
    CHECK(random_index(3) == 0.58);
    CHECK(random_index(7) == 1.32);
    CHECK(random_index(10) == 1.49);
    CHECK_THROWS(random_index(11));
    CHECK_THROWS(random_index(0));
}

TEST_CASE("small matrices are trivially consistent") {
    const std::array<IT2Judgment, 1> one = {judgment(Importance::VSI)};
    const auto m = ComparisonMatrix::from_upper(2, one);
    const auto c = consistency(m);
    CHECK(c.cr == 0.0);
    const auto w = compute_weights(m, {"a", "b"});
    CHECK(w.weights.values[0] > w.weights.values[1]);
}

TEST_CASE("weights of the shipped matrix") {
    const auto& file = default_matrix();
    const auto r = compute_weights(file.matrix, file.criteria);
    // Reference values from an independent script over the printed scale.
    const std::array<double, 7> golden = {0.3452, 0.2977, 0.1584, 0.1018, 0.0453, 0.0316, 0.0200};
    double sum = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(r.weights.values[i] == doctest::Approx(golden[i]).epsilon(0).scale(1).epsilon(5e-4));
        sum += r.weights.values[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(std::is_sorted(r.weights.values.rbegin(), r.weights.values.rend()));
    const auto pw = pollutant_weights(r.weights);
    CHECK(pw[index(Variable::PM25)] == r.weights.values[0]);
    CHECK(pw[index(Variable::NH3)] == r.weights.values[6]);
}

TEST_CASE("weights do not depend on criteria order") {
    // Reverse the criteria: the same judgments, transposed.
    const auto& file = default_matrix();
    std::vector<IT2Judgment> upper;
    for (int i = 6; i >= 0; --i)
        for (int j = i - 1; j >= 0; --j) upper.push_back(file.matrix.at(i, j));
    const auto m = ComparisonMatrix::from_upper(7, upper);
    std::vector<std::string> names(file.criteria.rbegin(), file.criteria.rend());
    const auto a = compute_weights(file.matrix, file.criteria);
    const auto b = compute_weights(m, names);
    for (std::size_t i = 0; i < 7; ++i) CHECK(a.weights.values[i] == doctest::Approx(b.weights.values[6 - i]));
}

TEST_CASE("flipping any strong judgment breaks consistency") {
    const auto& file = default_matrix();
    int flipped = 0;
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            if (kUpper[i][j] < 3) continue;  // below SI
            auto m = file.matrix;
            m.set(i, j, reciprocal(m.at(i, j)));
            CAPTURE(i);
            CAPTURE(j);
            CHECK(consistency(m).cr > 0.10);
            CHECK_THROWS_AS(compute_weights(m, file.criteria), ConsistencyError);
            ++flipped;
        }
    }
    CHECK(flipped == 15);
}

TEST_CASE("pollutant_weights needs every pollutant") {
    WeightVector w{{"PM2.5", "PM10"}, {0.5, 0.5}};
    CHECK_THROWS_AS(pollutant_weights(w), ValidationError);
}
