#include "aqi/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqi::inference {

void validate(const PollutantVector& x) {
    for (Variable p : kPollutants) {
        const double v = x[p];
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError("invalid concentration for " + std::string(name(p)) + ": " +
                                  format_number(v));
        }
    }
}

std::string describe(const PollutantVector& x) {
    std::string out = "(";
    for (std::size_t k = 0; k < kPollutantCount; ++k) {
        if (k > 0) out += ", ";
        out += name(kPollutants[k]);
        out += '=';
        out += format_number(x.values[k]);
    }
    return out + ")";
}

Fuzzified fuzzify(const PollutantVector& x, const it2::ParameterTable& table, bool saturate_top) {
    validate(x);
    Fuzzified out;
    for (Variable p : kPollutants) {
        const auto terms = table.terms(p);
        for (Term t : terms) {
            const bool saturate = saturate_top && t == terms.back();
            out.mu[index(p)][index(t)] = it2::membership_interval(table.at(p, t), x[p], saturate);
        }
    }
    return out;
}

FiringInterval firing_interval(const rules::FuzzyRule& rule, const Fuzzified& inputs) {
    FiringInterval f{1.0, 1.0};
    for (Variable p : kPollutants) {
        const auto& mu = inputs.at(p, rule.term_of(p));
        f.lo = std::min(f.lo, mu.lo);
        f.hi = std::min(f.hi, mu.hi);
    }
    return f;
}

double rule_weight(const rules::FuzzyRule& rule, const PollutantWeights& w, WeightPolicy policy) {
    double best = 0.0;
    bool found = false;
    if (policy == WeightPolicy::Driver) {
        for (Variable p : kPollutants) {
            if (rule.term_of(p) == rule.consequent) {
                best = found ? std::max(best, w[index(p)]) : w[index(p)];
                found = true;
            }
        }
    }
    if (!found) best = *std::max_element(w.begin(), w.end());
    return best;
}

FiringInterval weighted_firing(const rules::FuzzyRule& rule, FiringInterval f,
                               const PollutantWeights& w, WeightPolicy policy) {
    const double wn = rule_weight(rule, w, policy);
    return {wn * f.lo, wn * f.hi};
}

ConsequentCentroid consequent_centroid(const it2::IT2TrapezoidSet& s, CentroidGrid grid) {
    if (grid.points < 2 || !(grid.hi > grid.lo)) throw ValidationError("invalid centroid grid");
    std::vector<double> xs;
    std::vector<double> upper;
    std::vector<double> lower;
    const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double x = grid.lo + step * static_cast<double>(i);
        const double u = it2::eval(s.umf, x);
        if (u <= 0.0) continue;
        xs.push_back(x);
        upper.push_back(u);
        lower.push_back(it2::eval(s.lmf, x));
    }
    if (xs.empty()) throw ValidationError("consequent set has empty support on the grid");

    // Left: upper memberships for the first k points. Right: lower memberships
    // for the first k points. Suffix sums give every k in one pass.
    const std::size_t n = xs.size();
    std::vector<double> lower_num(n + 1, 0.0), lower_den(n + 1, 0.0);
    std::vector<double> upper_num(n + 1, 0.0), upper_den(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        lower_num[i] = lower_num[i + 1] + xs[i] * lower[i];
        lower_den[i] = lower_den[i + 1] + lower[i];
        upper_num[i] = upper_num[i + 1] + xs[i] * upper[i];
        upper_den[i] = upper_den[i + 1] + upper[i];
    }
    double un = 0.0, ud = 0.0, ln = 0.0, ld = 0.0;
    double cl = INFINITY;
    double cr = -INFINITY;
    for (std::size_t k = 0; k <= n; ++k) {
        const double left_den = ud + lower_den[k];
        if (left_den > 0.0) cl = std::min(cl, (un + lower_num[k]) / left_den);
        const double right_den = ld + upper_den[k];
        if (right_den > 0.0) cr = std::max(cr, (ln + upper_num[k]) / right_den);
        if (k < n) {
            un += xs[k] * upper[k];
            ud += upper[k];
            ln += xs[k] * lower[k];
            ld += lower[k];
        }
    }
    return {cl, cr};
}

namespace {

struct Point {
    double c;
    double lo;
    double hi;
};

std::vector<Point> sorted_points(std::span<const FiredRule> rules, bool left) {
    std::vector<Point> pts;
    pts.reserve(rules.size());
    for (const auto& r : rules) {
        if (!(r.firing.hi > 0.0)) continue;
        pts.push_back({left ? r.centroid.cl : r.centroid.cr, r.firing.lo, r.firing.hi});
    }
    if (pts.empty()) throw InferenceError("no rule fired");
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.c < b.c; });
    return pts;
}

// Weighted average with `first` weights on points [0, k) and `second` after.
double average(const std::vector<Point>& pts, std::size_t k, bool upper_first) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool first = i < k;
        const double f = (first == upper_first) ? pts[i].hi : pts[i].lo;
        num += f * pts[i].c;
        den += f;
    }
    return num / den;
}

KmEndpoint karnik_mendel(std::span<const FiredRule> rules, bool left) {
    const auto pts = sorted_points(rules, left);
    const std::size_t n = pts.size();

    double num = 0.0;
    double den = 0.0;
    for (const auto& p : pts) {
        const double mid = (p.lo + p.hi) / 2.0;
        num += mid * p.c;
        den += mid;
    }
    double y = num / den;

    // Switch point: number of centroids strictly below y, so equal averages
    // resolve to the smaller k. The left endpoint keeps at least one upper
    // firing on the first side; the right keeps at least one after it.
    auto switch_for = [&](double value) {
        std::size_t k = 0;
        while (k < n && pts[k].c < value) ++k;
        return left ? std::max<std::size_t>(k, 1) : std::min(k, n - 1);
    };

    KmEndpoint out;
    std::size_t k = switch_for(y);
    for (std::size_t it = 1;; ++it) {
        y = average(pts, k, left);
        out.iterations = it;
        const std::size_t next = switch_for(y);
        if (next == k || it > n) break;
        k = next;
    }
    out.value = y;
    out.switch_point = k;
    return out;
}

}  // namespace

KmEndpoint km_left(std::span<const FiredRule> rules) { return karnik_mendel(rules, true); }
KmEndpoint km_right(std::span<const FiredRule> rules) { return karnik_mendel(rules, false); }

TypeReducedInterval km_type_reduce(std::span<const FiredRule> rules) {
    TypeReducedInterval out;
    out.aqi_l = km_left(rules).value;
    out.aqi_r = km_right(rules).value;
    out.aqi = (out.aqi_l + out.aqi_r) / 2.0;
    return out;
}

Term categorize(Variable v, double value, const it2::ParameterTable& table) {
    if (!std::isfinite(value) || value < 0.0) {
        throw ValidationError(std::string(name(v)) + " value must be finite and non-negative, got " +
                              format_number(value));
    }
    const auto terms = table.terms(v);
    const Term top = terms.back();
    if (value >= table.at(v, top).umf.c) return top;
    Term best = terms.front();
    double best_mu = -1.0;
    for (Term t : terms) {
        const double mu = it2::eval(table.at(v, t).umf, value);
        if (mu >= best_mu) {
            best = t;
            best_mu = mu;
        }
    }
    return best;
}

Term categorize(double aqi, const it2::ParameterTable& table) {
    return categorize(Variable::AQI, aqi, table);
}

Engine::Engine(const it2::ParameterTable& table, const rules::RuleBase& rb, PollutantWeights weights,
               InferenceOptions options)
    : table_(table), rules_(rb), weights_(weights), options_(options) {
    for (Term t : kTerms) {
        centroids_[index(t)] = consequent_centroid(table.at(Variable::AQI, t), options.grid);
    }
}

std::vector<FiredRule> Engine::fire(const PollutantVector& x) const {
    const Fuzzified mu = fuzzify(x, table_, options_.saturate_top);

    // Only combinations of terms with positive upper membership can fire,
    // so enumerate those and look each up instead of scanning every rule.
    std::array<std::vector<Term>, kPollutantCount> active;
    std::size_t combos = 1;
    for (Variable p : kPollutants) {
        for (Term t : table_.terms(p)) {
            if (mu.at(p, t).hi > 0.0) active[index(p)].push_back(t);
        }
        combos *= active[index(p)].size();
    }

    std::vector<FiredRule> fired;
    std::array<std::size_t, kPollutantCount> digit{};
    std::array<Term, kPollutantCount> antecedent{};
    for (std::size_t n = 0; n < combos; ++n) {
        for (std::size_t k = 0; k < kPollutantCount; ++k) antecedent[k] = active[k][digit[k]];
        if (const auto* rule = rules_.find(antecedent)) {
            const FiringInterval f =
                weighted_firing(*rule, firing_interval(*rule, mu), weights_, options_.policy);
            if (f.hi > 0.0) fired.push_back({f, centroids_[index(rule->consequent)]});
        }
        for (std::size_t k = kPollutantCount; k-- > 0;) {
            if (++digit[k] < active[k].size()) break;
            digit[k] = 0;
        }
    }
    return fired;
}

Assessment Engine::assess(const PollutantVector& x) const {
    const auto fired = fire(x);
    if (fired.empty()) throw InferenceError("no rule fires for input " + describe(x));
    Assessment out;
    out.interval = km_type_reduce(fired);
    out.category = categorize(out.interval.aqi, table_);
    out.fired_rules = fired.size();
    return out;
}

Assessment assess(const PollutantVector& x, const rules::RuleBase& rb, const PollutantWeights& w,
                  const it2::ParameterTable& table, InferenceOptions options) {
    return Engine(table, rb, w, options).assess(x);
}

}  // namespace aqi::inference
