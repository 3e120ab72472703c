#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace collab::eval {

// Units x raters; a cell is empty when that rater did not score that unit.
struct RatingMatrix {
    std::vector<std::string> units;
    std::vector<std::string> raters;
    std::vector<std::vector<std::optional<double>>> cells;  // [unit][rater]

    // Throws Error(invalid_argument) on a shape mismatch, fewer than 2 raters or a non-finite cell.
    void check() const;
    std::size_t present(std::size_t unit) const;
};

struct AlphaResult {
    double alpha = 0.0;
    std::size_t pairable_values = 0;
    std::vector<std::string> excluded_units;  // fewer than two present cells
};

// Interval-level alpha from the coincidence formulation, squared-difference metric.
// Throws Error(undefined_statistic) when no unit is pairable or the expected
// disagreement is zero.
AlphaResult krippendorff_alpha(const RatingMatrix& m);
double krippendorff_alpha_interval(const RatingMatrix& m);

struct BootstrapCI {
    double low = 0.0;
    double high = 0.0;
    std::size_t iterations = 0;
    std::size_t skipped = 0;  // resamples where alpha was undefined
    std::uint64_t seed = 0;
};

// Percentile bootstrap over units (resampled with replacement), 2.5 and 97.5
// percentiles with linear interpolation. The generator is mt19937_64(seed) and
// indices are drawn as engine() % units, so results are identical on every platform.
BootstrapCI bootstrap_alpha_ci(const RatingMatrix& m, std::size_t iterations = 10000, std::uint64_t seed = 0);

struct Correlation {
    double rho = 0.0;
    double p = 1.0;  // two-sided, t approximation with n-2 degrees of freedom
};

// Average ranks for ties (1-based).
std::vector<double> average_ranks(std::span<const double> values);

// Throws Error(invalid_argument) for unequal lengths or n < 3, and
// Error(undefined_statistic) when either input is constant.
Correlation spearman_rho(std::span<const double> x, std::span<const double> y);

// Mean absolute difference. Throws Error(invalid_argument) when empty.
double mad_pairs(std::span<const std::pair<double, double>> pairs);

enum class IccForm { single, average };

struct AnovaTwoWay {
    double msr = 0.0;  // rows (units)
    double msc = 0.0;  // columns (raters)
    double mse = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

// rows = units, columns = raters, no missing cells.
AnovaTwoWay anova_two_way(const std::vector<std::vector<double>>& matrix);

// Two-way random effects, absolute agreement: ICC(2,1) or ICC(2,k).
// Throws Error(invalid_argument) for a ragged matrix or fewer than 2 units or
// raters, and Error(undefined_statistic) when the denominator is zero.
double icc(const std::vector<std::vector<double>>& matrix, IccForm form);

struct TestOptions {
    std::size_t wilcoxon_exact_max_n = 25;
    std::size_t mann_whitney_exact_max_total = 12;
};

struct WilcoxonResult {
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n = 0;  // non-zero differences
    double p = 1.0;     // two-sided
    double r = 0.0;     // matched-pairs rank-biserial, (W+ - W-) / (W+ + W-)
    bool exact = false;
};

// Differences are a - b. Zero differences are dropped and ties get average ranks.
// Exact p (conditional on the tie pattern) for n <= options.wilcoxon_exact_max_n,
// normal approximation with tie and continuity corrections above. Two-sided p is
// min(1, 2 * smaller tail). Throws Error(undefined_statistic) when every difference is 0.
WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs, const TestOptions& options = {});

struct MannWhitneyResult {
    double u = 0.0;  // U for the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

// Exact p over all group assignments of the pooled (tie-ranked) values when
// na + nb <= options.mann_whitney_exact_max_total; otherwise normal approximation
// with tie and continuity corrections. Throws Error(invalid_argument) when a sample is empty.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, const TestOptions& options = {});

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace collab::eval
