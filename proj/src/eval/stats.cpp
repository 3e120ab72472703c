#include "collab/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "collab/core/error.hpp"

namespace collab::eval {

namespace {

// Per-unit sums for alpha. Values are shifted by a common constant so that a
// matrix without variance yields exactly zero expected disagreement.
struct UnitSums {
    std::size_t m = 0;
    double within = 0.0;  // sum over unordered pairs of squared differences
    double s1 = 0.0;
    double s2 = 0.0;
};

std::vector<UnitSums> unit_sums(const RatingMatrix& m, std::vector<std::string>* excluded) {
    std::optional<double> shift;
    std::vector<UnitSums> out;
    for (std::size_t u = 0; u < m.cells.size(); ++u) {
        std::vector<double> vs;
        for (const auto& c : m.cells[u]) {
            if (c) vs.push_back(*c);
        }
        if (vs.size() < 2) {
            if (excluded) excluded->push_back(m.units[u]);
            continue;
        }
        if (!shift) shift = vs.front();
        UnitSums s;
        s.m = vs.size();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const double v = vs[i] - *shift;
            s.s1 += v;
            s.s2 += v * v;
            for (std::size_t j = i + 1; j < vs.size(); ++j) s.within += (vs[i] - vs[j]) * (vs[i] - vs[j]);
        }
        out.push_back(s);
    }
    return out;
}

struct AlphaAccumulator {
    double n = 0.0;
    double observed = 0.0;  // sum of within / (m - 1)
    double s1 = 0.0;
    double s2 = 0.0;

    void add(const UnitSums& u) {
        n += static_cast<double>(u.m);
        observed += u.within / static_cast<double>(u.m - 1);
        s1 += u.s1;
        s2 += u.s2;
    }

    std::optional<double> alpha() const {
        const double expected = n * s2 - s1 * s1;
        if (n < 2 || !(expected > 0.0)) return std::nullopt;
        return 1.0 - (n - 1.0) * observed / expected;
    }
};

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double two_sided_from_z(double deviation, double sigma) {
    if (!(sigma > 0.0)) return 1.0;
    const double z = (std::abs(deviation) - 0.5) / sigma;
    if (z <= 0.0) return 1.0;
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double tie_term(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

// Two-sided p from a discrete distribution given as counts over integer support.
double exact_two_sided(const std::vector<double>& counts, std::size_t observed) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double lower = 0.0, upper = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (s <= observed) lower += counts[s];
        if (s >= observed) upper += counts[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

// Average ranks are multiples of 1/2, so doubled ranks are exact integers.
std::size_t doubled(double rank) { return static_cast<std::size_t>(std::llround(2.0 * rank)); }

}  // namespace

void RatingMatrix::check() const {
    if (raters.size() < 2) throw Error(Errc::invalid_argument, "a rating matrix needs at least 2 raters");
    if (cells.size() != units.size()) throw Error(Errc::invalid_argument, "one cell row per unit is required");
    for (const auto& row : cells) {
        if (row.size() != raters.size()) throw Error(Errc::invalid_argument, "one cell per rater is required");
        for (const auto& c : row) {
            if (c && !std::isfinite(*c)) throw Error(Errc::invalid_argument, "scores must be finite");
        }
    }
}

std::size_t RatingMatrix::present(std::size_t unit) const {
    return static_cast<std::size_t>(
        std::count_if(cells[unit].begin(), cells[unit].end(), [](const auto& c) { return c.has_value(); }));
}

AlphaResult krippendorff_alpha(const RatingMatrix& m) {
    m.check();
    AlphaResult r;
    const auto sums = unit_sums(m, &r.excluded_units);
    AlphaAccumulator acc;
    for (const auto& u : sums) acc.add(u);
    r.pairable_values = static_cast<std::size_t>(acc.n);
    const auto a = acc.alpha();
    if (!a) throw Error(Errc::undefined_statistic, "alpha is undefined: no variance among pairable values");
    r.alpha = *a;
    return r;
}

double krippendorff_alpha_interval(const RatingMatrix& m) { return krippendorff_alpha(m).alpha; }

BootstrapCI bootstrap_alpha_ci(const RatingMatrix& m, std::size_t iterations, std::uint64_t seed) {
    m.check();
    if (iterations == 0) throw Error(Errc::invalid_argument, "bootstrap needs at least one iteration");
    const auto sums = unit_sums(m, nullptr);
    if (sums.empty()) throw Error(Errc::undefined_statistic, "alpha is undefined: no pairable unit");
    std::mt19937_64 engine(seed);
    std::vector<double> alphas;
    alphas.reserve(iterations);
    BootstrapCI ci;
    ci.iterations = iterations;
    ci.seed = seed;
    for (std::size_t it = 0; it < iterations; ++it) {
        AlphaAccumulator acc;
        for (std::size_t i = 0; i < sums.size(); ++i) acc.add(sums[engine() % sums.size()]);
        if (const auto a = acc.alpha()) {
            alphas.push_back(*a);
        } else {
            ++ci.skipped;
        }
    }
    if (alphas.empty()) throw Error(Errc::undefined_statistic, "alpha is undefined in every bootstrap resample");
    std::sort(alphas.begin(), alphas.end());
    ci.low = percentile(alphas, 0.025);
    ci.high = percentile(alphas, 0.975);
    return ci;
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

Correlation spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(Errc::invalid_argument, "spearman: inputs differ in length");
    if (x.size() < 3) throw Error(Errc::invalid_argument, "spearman: at least 3 pairs are required");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw Error(Errc::invalid_argument, "spearman: values must be finite");
        }
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;  // ranks always average to this
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(Errc::undefined_statistic, "spearman: an input is constant");
    Correlation c;
    c.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::abs(c.rho) >= 1.0) {
        c.p = 0.0;
    } else {
        const double df = n - 2.0;
        const double t = c.rho * std::sqrt(df / (1.0 - c.rho * c.rho));
        const boost::math::students_t dist(df);
        c.p = std::min(1.0, 2.0 * boost::math::cdf(dist, -std::abs(t)));
    }
    return c;
}

double mad_pairs(std::span<const std::pair<double, double>> pairs) {
    if (pairs.empty()) throw Error(Errc::invalid_argument, "mad: no pairs");
    double sum = 0.0;
    for (const auto& [a, b] : pairs) sum += std::abs(a - b);
    return sum / static_cast<double>(pairs.size());
}

AnovaTwoWay anova_two_way(const std::vector<std::vector<double>>& x) {
    if (x.size() < 2) throw Error(Errc::invalid_argument, "icc: at least 2 units are required");
    const std::size_t k = x.front().size();
    if (k < 2) throw Error(Errc::invalid_argument, "icc: at least 2 raters are required");
    for (const auto& row : x) {
        if (row.size() != k) throw Error(Errc::invalid_argument, "icc: the matrix must be complete");
        for (double v : row) {
            if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "icc: scores must be finite");
        }
    }
    const std::size_t n = x.size();
    std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            row_mean[i] += x[i][j];
            col_mean[j] += x[i][j];
            grand += x[i][j];
        }
    }
    for (auto& r : row_mean) r /= static_cast<double>(k);
    for (auto& c : col_mean) c /= static_cast<double>(n);
    grand /= static_cast<double>(n * k);
    double ssr = 0.0, ssc = 0.0, sse = 0.0;
    for (double r : row_mean) ssr += (r - grand) * (r - grand);
    for (double c : col_mean) ssc += (c - grand) * (c - grand);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double e = x[i][j] - row_mean[i] - col_mean[j] + grand;
            sse += e * e;
        }
    }
    AnovaTwoWay a;
    a.n = n;
    a.k = k;
    a.msr = static_cast<double>(k) * ssr / static_cast<double>(n - 1);
    a.msc = static_cast<double>(n) * ssc / static_cast<double>(k - 1);
    a.mse = sse / static_cast<double>((n - 1) * (k - 1));
    return a;
}

double icc(const std::vector<std::vector<double>>& matrix, IccForm form) {
    const auto a = anova_two_way(matrix);
    const bool constant = std::all_of(matrix.begin(), matrix.end(), [&](const auto& row) {
        return std::all_of(row.begin(), row.end(), [&](double v) { return v == matrix[0][0]; });
    });
    if (constant) throw Error(Errc::undefined_statistic, "icc: all scores are equal");
    const double n = static_cast<double>(a.n);
    const double k = static_cast<double>(a.k);
    const double denom = form == IccForm::single ? a.msr + (k - 1.0) * a.mse + (k / n) * (a.msc - a.mse)
                                                 : a.msr + (a.msc - a.mse) / n;
    if (denom == 0.0 || !std::isfinite(denom)) throw Error(Errc::undefined_statistic, "icc: degenerate variance");
    return (a.msr - a.mse) / denom;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs, const TestOptions& options) {
    std::vector<double> diffs;
    for (const auto& [a, b] : pairs) {
        const double d = a - b;
        if (!std::isfinite(d)) throw Error(Errc::invalid_argument, "wilcoxon: values must be finite");
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw Error(Errc::undefined_statistic, "wilcoxon: every difference is zero");
    std::vector<double> magnitudes(diffs.size());
    std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(magnitudes);

    WilcoxonResult r;
    r.n = diffs.size();
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
    r.r = (r.w_plus - r.w_minus) / (r.w_plus + r.w_minus);

    if (r.n <= options.wilcoxon_exact_max_n) {
        r.exact = true;
        // counts[s]: sign assignments whose positive doubled-rank sum is s.
        std::size_t total = 0;
        for (double rk : ranks) total += doubled(rk);
        std::vector<double> counts(total + 1, 0.0);
        counts[0] = 1.0;
        std::size_t reach = 0;
        for (double rk : ranks) {
            const auto d = doubled(rk);
            reach += d;
            for (std::size_t s = reach + 1; s-- > d;) counts[s] += counts[s - d];
        }
        r.p = exact_two_sided(counts, doubled(r.w_plus));
    } else {
        const double n = static_cast<double>(r.n);
        const double mu = n * (n + 1.0) / 4.0;
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(magnitudes) / 48.0;
        r.p = two_sided_from_z(r.w_plus - mu, std::sqrt(std::max(var, 0.0)));
    }
    return r;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, const TestOptions& options) {
    if (a.empty() || b.empty()) throw Error(Errc::invalid_argument, "mann-whitney: both samples must be non-empty");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "mann-whitney: values must be finite");
    }
    const auto ranks = average_ranks(pooled);
    const std::size_t na = a.size(), nb = b.size(), total = pooled.size();
    double ra = 0.0;
    for (std::size_t i = 0; i < na; ++i) ra += ranks[i];

    MannWhitneyResult r;
    const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
    r.u = ra - fa * (fa + 1.0) / 2.0;
    if (total <= options.mann_whitney_exact_max_total) {
        r.exact = true;
        // ways[j][s]: subsets of size j whose doubled rank sum is s.
        std::size_t sum2 = 0;
        for (double rk : ranks) sum2 += doubled(rk);
        std::vector<std::vector<double>> ways(na + 1, std::vector<double>(sum2 + 1, 0.0));
        ways[0][0] = 1.0;
        for (double rk : ranks) {
            const auto d = doubled(rk);
            for (std::size_t j = na; j >= 1; --j) {
                for (std::size_t s = sum2 + 1; s-- > d;) ways[j][s] += ways[j - 1][s - d];
            }
        }
        r.p = exact_two_sided(ways[na], doubled(ra));
    } else {
        const double n = static_cast<double>(total);
        const double var = fa * fb / 12.0 * ((n + 1.0) - tie_term(pooled) / (n * (n - 1.0)));
        r.p = two_sided_from_z(r.u - fa * fb / 2.0, std::sqrt(std::max(var, 0.0)));
    }
    return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace collab::eval
