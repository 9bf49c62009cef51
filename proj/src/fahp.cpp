#include "aqi/fahp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "aqi/resources.hpp"

namespace aqi::fahp {

namespace {

constexpr double kLowerHeight = 0.8;

struct ScaleEntry {
    std::string_view label;
    it2::Trapezoid umf;
    it2::Trapezoid lmf;
};

// Upper trapezoids span the neighbouring integers; lower ones are inset by 0.4.
constexpr std::array<ScaleEntry, 8> kScale = {{
    {"JE", {1, 1, 1, 1, 1}, {1, 1, 1, 1, kLowerHeight}},
    {"WI", {1, 2, 3, 4, 1}, {1.4, 2.4, 2.6, 3.6, kLowerHeight}},
    {"BWSI", {2, 3, 4, 5, 1}, {2.4, 3.4, 3.6, 4.6, kLowerHeight}},
    {"SI", {3, 4, 5, 6, 1}, {3.4, 4.4, 4.6, 5.6, kLowerHeight}},
    {"BSVI", {4, 5, 6, 7, 1}, {4.4, 5.4, 5.6, 6.6, kLowerHeight}},
    {"VSI", {5, 6, 7, 8, 1}, {5.4, 6.4, 6.6, 7.6, kLowerHeight}},
    {"BVAI", {6, 7, 8, 9, 1}, {6.4, 7.4, 7.6, 8.6, kLowerHeight}},
    {"AI", {7, 8, 9, 9, 1}, {7.4, 8.4, 8.6, 9, kLowerHeight}},
}};

constexpr std::array<double, 10> kRandomIndex = {0,    0,    0.58, 0.90, 1.12,
                                                 1.24, 1.32, 1.41, 1.45, 1.49};

it2::Trapezoid reciprocal(const it2::Trapezoid& t) {
    if (t.a <= 0.0) throw ValidationError("judgment support must be positive for a reciprocal");
    return {1.0 / t.d, 1.0 / t.c, 1.0 / t.b, 1.0 / t.a, t.h};
}

double dtrat_part(const it2::Trapezoid& t) {
    return ((t.d - t.a) + (t.h * t.b - t.a) + (t.h * t.c - t.a)) / 4.0 + t.a;
}

bool is_point(const it2::Trapezoid& t) { return t.a == t.b && t.b == t.c && t.c == t.d; }

it2::Trapezoid geometric_mean(std::span<const IT2Judgment> row, bool upper) {
    std::array<double, 4> log_sum{};
    double height = 1.0;
    for (const auto& j : row) {
        const auto& t = upper ? j.umf : j.lmf;
        const std::array<double, 4> v = {t.a, t.b, t.c, t.d};
        for (std::size_t k = 0; k < 4; ++k) {
            if (v[k] <= 0.0) throw ValidationError("geometric mean needs positive components");
            log_sum[k] += std::log(v[k]);
        }
        height = std::min(height, t.h);
    }
    const double n = static_cast<double>(row.size());
    return {std::exp(log_sum[0] / n), std::exp(log_sum[1] / n), std::exp(log_sum[2] / n),
            std::exp(log_sum[3] / n), height};
}

}  // namespace

std::string_view label(Importance level) { return kScale[static_cast<std::size_t>(level)].label; }

IT2Judgment judgment(Importance level) {
    const auto& e = kScale[static_cast<std::size_t>(level)];
    return {e.umf, e.lmf};
}

IT2Judgment singleton(double k) { return {{k, k, k, k, 1.0}, {k, k, k, k, 1.0}}; }

IT2Judgment reciprocal(const IT2Judgment& j) { return {reciprocal(j.umf), reciprocal(j.lmf)}; }

double dtrat(const IT2Judgment& j) { return (dtrat_part(j.umf) + dtrat_part(j.lmf)) / 2.0; }

double crisp_value(const IT2Judgment& j) {
    if (is_point(j.umf) && is_point(j.lmf) && j.umf.a == j.lmf.a) return j.umf.a;
    return dtrat(j);
}

IT2Judgment fuzzy_geometric_mean(std::span<const IT2Judgment> row) {
    if (row.empty()) throw ValidationError("geometric mean of an empty row");
    return {geometric_mean(row, true), geometric_mean(row, false)};
}

ComparisonMatrix ComparisonMatrix::from_upper(std::size_t n, std::span<const IT2Judgment> upper) {
    if (n == 0) throw ValidationError("comparison matrix must have at least one criterion");
    if (upper.size() != n * (n - 1) / 2) {
        throw ValidationError("expected " + std::to_string(n * (n - 1) / 2) +
                              " upper-triangle judgments, got " + std::to_string(upper.size()));
    }
    ComparisonMatrix m;
    m.n_ = n;
    m.cells_.assign(n * n, judgment(Importance::JE));
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, upper[k++]);
    }
    return m;
}

void ComparisonMatrix::set(std::size_t row, std::size_t col, const IT2Judgment& j) {
    if (row >= n_ || col >= n_) throw std::out_of_range("comparison matrix index");
    if (row == col) throw ValidationError("diagonal judgments are fixed to JE");
    it2::validate(j.umf);
    it2::validate(j.lmf);
    cells_[row * n_ + col] = j;
    cells_[col * n_ + row] = fahp::reciprocal(j);
}

std::vector<double> ComparisonMatrix::crisp() const {
    std::vector<double> out(n_ * n_, 1.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (i != j) out[i * n_ + j] = crisp_value(at(i, j));
        }
    }
    return out;
}

double random_index(std::size_t n) {
    if (n == 0 || n > kRandomIndex.size()) {
        throw ValidationError("no random index for matrix order " + std::to_string(n));
    }
    return kRandomIndex[n - 1];
}

Consistency consistency(const ComparisonMatrix& m) {
    constexpr double kTolerance = 1e-12;
    constexpr std::size_t kMaxIterations = 10000;

    const std::size_t n = m.size();
    const double ri = random_index(n);
    const auto a = m.crisp();

    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    Consistency result;
    bool converged = false;
    for (std::size_t it = 1; it <= kMaxIterations; ++it) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * v[j];
            next[i] = s;
            total += s;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= total;
            change = std::max(change, std::abs(next[i] - v[i]));
        }
        v.swap(next);
        result.iterations = it;
        if (change < kTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConsistencyError("principal eigenvector did not converge", NAN);

    // v sums to one, so the eigenvalue is the sum of A v.
    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) lambda += a[i * n + j] * v[j];
    }
    result.lambda_max = lambda;
    if (n > 2) {
        result.ci = (lambda - static_cast<double>(n)) / static_cast<double>(n - 1);
        result.cr = result.ci / ri;
    }
    return result;
}

WeightResult compute_weights(const ComparisonMatrix& m, std::vector<std::string> criteria,
                             double max_cr) {
    const std::size_t n = m.size();
    if (criteria.size() != n) throw ValidationError("criteria count does not match matrix order");

    WeightResult out;
    out.consistency = consistency(m);
    if (out.consistency.cr > max_cr) {
        throw ConsistencyError("consistency ratio " + format_fixed(out.consistency.cr, 4) +
                                   " exceeds threshold " + format_number(max_cr),
                               out.consistency.cr);
    }

    std::vector<IT2Judgment> means;
    means.reserve(n);
    std::vector<IT2Judgment> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = m.at(i, j);
        means.push_back(fuzzy_geometric_mean(row));
    }

    auto sum_of = [&](bool upper) {
        it2::Trapezoid s{0, 0, 0, 0, 1.0};
        for (const auto& g : means) {
            const auto& t = upper ? g.umf : g.lmf;
            s.a += t.a;
            s.b += t.b;
            s.c += t.c;
            s.d += t.d;
            s.h = std::min(s.h, t.h);
        }
        return s;
    };
    const it2::Trapezoid inv_upper = reciprocal(sum_of(true));
    const it2::Trapezoid inv_lower = reciprocal(sum_of(false));

    auto times = [](const it2::Trapezoid& x, const it2::Trapezoid& y) {
        return it2::Trapezoid{x.a * y.a, x.b * y.b, x.c * y.c, x.d * y.d, std::min(x.h, y.h)};
    };

    std::vector<double> crisp(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        IT2Judgment w{times(means[i].umf, inv_upper), times(means[i].lmf, inv_lower)};
        crisp[i] = dtrat(w);
        total += crisp[i];
        out.fuzzy_weights.push_back(w);
    }
    if (!(total > 0.0)) throw ValidationError("all crisp weights are zero");
    for (double& w : crisp) w /= total;

    out.weights.criteria = std::move(criteria);
    out.weights.values = std::move(crisp);
    return out;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

struct Cell {
    Importance level;
    bool reciprocal;
};

std::optional<Cell> parse_cell(std::string_view text) {
    bool recip = false;
    if (text.starts_with("1/")) {
        recip = true;
        text.remove_prefix(2);
    }
    for (Importance level : kImportanceScale) {
        if (text == label(level)) return Cell{level, recip};
    }
    return std::nullopt;
}

std::string cell_text(Importance level, bool recip) {
    return (recip ? "1/" : "") + std::string(label(level));
}

}  // namespace

MatrixFile parse_matrix(std::string_view text) {
    MatrixFile file;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (file.criteria.empty()) {
            file.criteria = std::move(tokens);
            continue;
        }
        rows.push_back(std::move(tokens));
        row_lines.push_back(line_no);
    }
    const std::size_t n = file.criteria.size();
    if (n == 0) throw ParseError("matrix file has no header row");
    if (rows.size() != n) {
        throw ParseError("expected " + std::to_string(n) + " matrix rows, got " +
                         std::to_string(rows.size()));
    }

    std::vector<IT2Judgment> upper;
    file.upper_levels.resize(n);
    file.upper_reciprocal.resize(n);
    std::vector<std::vector<std::optional<Cell>>> lower(n, std::vector<std::optional<Cell>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i];
        if (r.size() != n + 1) {
            throw ParseError("row needs a label and " + std::to_string(n) + " cells", row_lines[i], 1);
        }
        if (r[0] != file.criteria[i]) {
            throw ParseError("row label '" + r[0] + "' does not match column '" + file.criteria[i] + "'",
                             row_lines[i], 1);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& tok = r[j + 1];
            if (j < i) {
                if (tok == "-") continue;
                const auto cell = parse_cell(tok);
                if (!cell) throw ParseError("unknown scale label '" + tok + "'", row_lines[i], j + 2);
                lower[i][j] = cell;
                continue;
            }
            const auto cell = parse_cell(tok);
            if (!cell) throw ParseError("unknown scale label '" + tok + "'", row_lines[i], j + 2);
            if (j == i) {
                if (cell->level != Importance::JE) {
                    throw ParseError("diagonal cell must be JE", row_lines[i], j + 2);
                }
                continue;
            }
            file.upper_levels[i].push_back(cell->level);
            file.upper_reciprocal[i].push_back(cell->reciprocal);
            const IT2Judgment jd = judgment(cell->level);
            upper.push_back(cell->reciprocal ? reciprocal(jd) : jd);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (!lower[i][j]) continue;
            const Importance up = file.upper_levels[j][i - j - 1];
            const bool up_recip = file.upper_reciprocal[j][i - j - 1];
            const bool matches = lower[i][j]->level == up && lower[i][j]->reciprocal != up_recip;
            if (!matches) {
                file.warnings.push_back("cell (" + file.criteria[i] + ", " + file.criteria[j] + ") is " +
                                        cell_text(lower[i][j]->level, lower[i][j]->reciprocal) +
                                        " but the reciprocal of the upper cell is " +
                                        cell_text(up, !up_recip) + "; using the latter");
            }
        }
    }
    file.matrix = ComparisonMatrix::from_upper(n, upper);
    return file;
}

std::string serialize_matrix(const MatrixFile& file) {
    const std::size_t n = file.criteria.size();
    std::ostringstream out;
    auto pad = [&](const std::string& s) {
        out << s;
        for (std::size_t k = s.size(); k < 8; ++k) out << ' ';
    };
    pad("");
    for (std::size_t j = 0; j < n; ++j) {
        if (j + 1 == n) out << file.criteria[j];
        else pad(file.criteria[j]);
    }
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        pad(file.criteria[i]);
        for (std::size_t j = 0; j < n; ++j) {
            std::string cell;
            if (i == j) cell = "JE";
            else if (j > i) cell = cell_text(file.upper_levels[i][j - i - 1], file.upper_reciprocal[i][j - i - 1]);
            else cell = cell_text(file.upper_levels[j][i - j - 1], !file.upper_reciprocal[j][i - j - 1]);
            if (j + 1 == n) out << cell;
            else pad(cell);
        }
        out << '\n';
    }
    return out.str();
}

const MatrixFile& default_matrix() {
    static const MatrixFile file = parse_matrix(resources::comparison_matrix());
    return file;
}

std::array<double, kPollutantCount> pollutant_weights(const WeightVector& w) {
    std::array<double, kPollutantCount> out{};
    std::array<bool, kPollutantCount> seen{};
    for (std::size_t i = 0; i < w.criteria.size(); ++i) {
        const auto v = parse_variable(w.criteria[i]);
        if (!v || !is_pollutant(*v)) {
            throw ValidationError("criterion '" + w.criteria[i] + "' is not a pollutant");
        }
        out[index(*v)] = w.values.at(i);
        seen[index(*v)] = true;
    }
    for (Variable p : kPollutants) {
        if (!seen[index(p)]) throw ValidationError("no weight for pollutant " + std::string(name(p)));
    }
    return out;
}

}  // namespace aqi::fahp
