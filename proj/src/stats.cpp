#include "impactlab/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "impactlab/errors.hpp"

namespace impactlab::stats {

namespace {

constexpr double kNormal05 = 1.959963984540054;
constexpr double kNormal01 = 2.5758293035489004;

Significance classify(double stat, double crit05, double crit01) {
    if (std::isnan(stat)) return Significance::None;
    if (stat >= crit01) return Significance::P01;
    if (stat >= crit05) return Significance::P05;
    return Significance::None;
}

}  // namespace

std::string_view stars(Significance s) {
    switch (s) {
        case Significance::P01: return "**";
        case Significance::P05: return "*";
        case Significance::None: break;
    }
    return "";
}

double t_critical(double alpha, double dof) {
    if (dof > 200.0) {
        if (alpha == 0.05) return kNormal05;
        if (alpha == 0.01) return kNormal01;
    }
    boost::math::students_t dist(dof);
    return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

Significance t_significance(double t, double dof) {
    if (!(dof > 0.0)) return Significance::None;
    return classify(std::fabs(t), t_critical(0.05, dof), t_critical(0.01, dof));
}

double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double population_sd(std::span<const double> x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

TTestResult welch_t(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw NumericalError("welch_t: each sample needs at least 2 observations");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double mx = mean(x), my = mean(y);
    const double vx = sample_variance(x), vy = sample_variance(y);
    const double sx = vx / nx, sy = vy / ny;
    const double se2 = sx + sy;

    TTestResult r;
    if (se2 == 0.0) {
        r.dof = nx + ny - 2.0;
        if (mx == my) return r;
        r.infinite = true;
        r.t = mx > my ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.signif = Significance::P01;
        return r;
    }
    r.t = (mx - my) / std::sqrt(se2);
    r.dof = se2 * se2 / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    r.signif = t_significance(r.t, r.dof);
    return r;
}

AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) throw NumericalError("anova: need at least 2 groups");
    std::size_t total = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) throw NumericalError("anova: empty group");
        total += g.size();
        grand += std::accumulate(g.begin(), g.end(), 0.0);
    }
    if (total <= groups.size()) throw NumericalError("anova: no within-group degrees of freedom");
    grand /= static_cast<double>(total);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ss_within += (v - m) * (v - m);
    }

    AnovaResult r;
    r.df_between = static_cast<int>(groups.size()) - 1;
    r.df_within = static_cast<int>(total - groups.size());
    if (ss_within == 0.0) {
        if (ss_between == 0.0) throw NumericalError("anova: degenerate, all observations equal");
        r.f = std::numeric_limits<double>::infinity();
        r.signif = Significance::P01;
        return r;
    }
    r.f = (ss_between / r.df_between) / (ss_within / r.df_within);
    boost::math::fisher_f dist(r.df_between, r.df_within);
    const double c05 = boost::math::quantile(boost::math::complement(dist, 0.05));
    const double c01 = boost::math::quantile(boost::math::complement(dist, 0.01));
    r.signif = classify(r.f, c05, c01);
    return r;
}

Standardized standardize(std::span<const double> values) {
    if (values.size() < 2) throw NumericalError("standardize: need at least 2 values");
    const double sd = population_sd(values);
    if (!(sd > 0.0)) throw NumericalError("standardize: zero variance");
    Standardized out;
    out.scale = sd;
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back(v / sd);
    return out;
}

}  // namespace impactlab::stats
