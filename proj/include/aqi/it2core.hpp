#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqi/common.hpp"

namespace aqi::it2 {

/// Trapezoid (a, b, c, d) scaled to height h. b == c is the triangular case.
struct Trapezoid {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double h = 1.0;

    friend bool operator==(const Trapezoid&, const Trapezoid&) = default;
};

/// Throws ValidationError unless a <= b <= c <= d, 0 < h <= 1 and all finite.
void validate(const Trapezoid& t);

/// Ramp / closed plateau [b, c] / ramp, scaled by h; zero outside [a, d].
/// Pure and total on finite x; a non-finite x throws ValidationError.
double eval(const Trapezoid& t, double x);

/// Same as eval(), but x >= c yields h (right-shoulder saturation).
double eval_saturated(const Trapezoid& t, double x);

struct MembershipInterval {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const MembershipInterval&, const MembershipInterval&) = default;
};

/// Interval Type-2 set: the region between the lower and upper trapezoid.
struct IT2TrapezoidSet {
    Term term = Term::Good;
    Trapezoid umf;
    Trapezoid lmf;

    friend bool operator==(const IT2TrapezoidSet&, const IT2TrapezoidSet&) = default;
};

/// Checks both trapezoids, lmf.h <= umf.h and lmf support inside umf support.
void validate(const IT2TrapezoidSet& s);

/// LMF(x) <= UMF(x) on `points` evenly spaced samples of the UMF support.
bool fou_contained(const IT2TrapezoidSet& s, std::size_t points = 10001);

/// [LMF(x), UMF(x)]. Negative or non-finite x throws ValidationError.
/// With `saturate`, both bounds hold their plateau height for x >= c.
MembershipInterval membership_interval(const IT2TrapezoidSet& s, double x,
                                       bool saturate = false);

/// IT2 sets keyed by (variable, term). Immutable once loaded.
class ParameterTable {
public:
    ParameterTable() = default;

    bool has(Variable v, Term t) const { return sets_[index(v)][index(t)].has_value(); }

    /// Throws std::out_of_range when the entry is absent.
    const IT2TrapezoidSet& at(Variable v, Term t) const;

    /// Terms defined for `v`, in severity order.
    std::vector<Term> terms(Variable v) const;

    /// Most severe term defined for `v`.
    Term top_term(Variable v) const;

    /// Adds or replaces an entry after validating it.
    void set(Variable v, const IT2TrapezoidSet& s);

    /// Whole-table invariants: each variable non-empty, AQI has all six terms.
    void validate() const;

    friend bool operator==(const ParameterTable&, const ParameterTable&) = default;

private:
    std::array<std::array<std::optional<IT2TrapezoidSet>, kTermCount>, kVariableCount> sets_{};
};

/// Parses the TOML-style config:
///
///     ["PM2.5".Good]
///     umf = [0, 0, 15, 30, 1]
///     lmf = [0, 0, 12, 27, 0.8]
///
/// Errors carry line/column for syntax faults and name the (variable, term)
/// for invariant faults.
ParameterTable load_parameter_table(std::string_view text);

/// Inverse of load_parameter_table().
std::string serialize_parameter_table(const ParameterTable& table);

/// Built-in membership parameters for the seven pollutants and the AQI.
const ParameterTable& default_parameter_table();

/// Text of the built-in table, as shipped.
std::string_view default_parameter_text();

}  // namespace aqi::it2
