#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace impactlab::stats {

/// Two-tailed significance at the two star levels used in the tables.
enum class Significance { None, P05, P01 };

std::string_view stars(Significance s);  // "", "*", "**"

/// Two-tailed Student-t critical value. For dof > 200 the normal limit is used.
double t_critical(double alpha, double dof);

Significance t_significance(double t, double dof);

struct TTestResult {
    double t = 0.0;
    double dof = 0.0;
    Significance signif = Significance::None;
    bool infinite = false;  // both samples constant with different means
};

/// Welch unequal-variance t of mean(x) - mean(y) with Welch-Satterthwaite dof.
/// Requires at least two observations per sample (NumericalError otherwise).
TTestResult welch_t(std::span<const double> x, std::span<const double> y);

struct AnovaResult {
    double f = 0.0;
    int df_between = 0;
    int df_within = 0;
    Significance signif = Significance::None;
};

/// One-way ANOVA F = MS_between / MS_within. Throws NumericalError when there
/// are fewer than two groups, an empty group, no within-group degrees of
/// freedom, or both sums of squares vanish.
AnovaResult anova_oneway(std::span<const std::vector<double>> groups);

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator).
double sample_variance(std::span<const double> x);
/// Population standard deviation (n denominator).
double population_sd(std::span<const double> x);

struct Standardized {
    std::vector<double> values;
    double scale = 1.0;  // the divisor
};

/// Divides by the population standard deviation without centering.
Standardized standardize(std::span<const double> values);

}  // namespace impactlab::stats
