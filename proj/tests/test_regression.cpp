#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "impactlab/errors.hpp"
#include "impactlab/regression.hpp"
#include "oracles.hpp"

using namespace impactlab;

namespace {

const std::vector<std::string> kNames{"beta1", "beta2", "beta3", "beta4"};

struct Design {
    std::vector<std::vector<double>> cols;
    std::vector<double> y;
};

Design synthetic(std::uint64_t seed, std::size_t n, const std::vector<double>& beta, double noise) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Design d;
    d.cols.assign(beta.size() - 1, std::vector<double>(n));
    d.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = beta[0];
        for (std::size_t j = 0; j + 1 < beta.size(); ++j) {
            d.cols[j][i] = j == 2 ? (z(gen) > 0 ? 1.0 : 0.0) : 2.0 + z(gen) * (1.0 + j);
            d.y[i] += beta[j + 1] * d.cols[j][i];
        }
        d.y[i] += noise * z(gen);
    }
    return d;
}

}  // namespace

TEST(Ols, NoiselessRecovery) {
    const std::vector<double> beta{0.5, 1.25, -2.0, 0.75, 3.0};
    const auto d = synthetic(1, 40, beta, 0.0);
    const auto r = ols_fit(kNames, d.cols, d.y);
    ASSERT_EQ(r.coefficients.size(), 5u);
    for (std::size_t j = 0; j < beta.size(); ++j) EXPECT_NEAR(r.coefficients[j].value, beta[j], 1e-9);
    EXPECT_NEAR(r.r_square, 1.0, 1e-12);
    EXPECT_EQ(r.at("alpha").name, "alpha");
    EXPECT_EQ(r.n_rows, 40u);
    EXPECT_EQ(r.dof, 35u);
}

TEST(Ols, OrthogonalResponse) {
    // regressors and response built from mutually orthogonal contrasts
    const std::vector<double> x1{1, -1, 1, -1, 1, -1, 1, -1};
    const std::vector<double> x2{1, 1, -1, -1, 1, 1, -1, -1};
    const std::vector<double> y{1, -1, -1, 1, 1, -1, -1, 1};
    const std::vector<std::string> names{"a", "b"};
    const std::vector<std::vector<double>> cols{x1, x2};
    const auto r = ols_fit(names, cols, y);
    for (const auto& c : r.coefficients) EXPECT_NEAR(c.value, 0.0, 1e-12);
    EXPECT_NEAR(r.r_square, 0.0, 1e-12);
}

TEST(Ols, CollinearIsSingular) {
    auto d = synthetic(2, 30, {0, 1, 1, 1, 1}, 0.1);
    for (std::size_t i = 0; i < 30; ++i) d.cols[1][i] = 2.0 * d.cols[0][i];
    EXPECT_THROW(ols_fit(kNames, d.cols, d.y), SingularDesignError);
    EXPECT_THROW(ols_fit(kNames, d.cols, std::vector<double>(30, 1.0)), NumericalError);
    const auto small = synthetic(2, 5, {0, 1, 1, 1, 1}, 0.1);
    EXPECT_THROW(ols_fit(kNames, small.cols, small.y), NumericalError);
}

TEST(Ols, ResidualsOrthogonalToRegressors) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = synthetic(seed, 60, {0.3, 1, -1, 0.5, 2}, 1.0);
        const auto r = ols_fit(kNames, d.cols, d.y);
        double sum = 0.0, scale = 0.0;
        for (double e : r.residuals) {
            sum += e;
            scale += std::fabs(e);
        }
        EXPECT_LT(std::fabs(sum), 1e-9 * scale);
        for (const auto& col : d.cols) {
            double dot = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < col.size(); ++i) {
                dot += col[i] * r.residuals[i];
                mag += std::fabs(col[i] * r.residuals[i]);
            }
            EXPECT_LT(std::fabs(dot), 1e-9 * mag);
        }
    }
}

TEST(Ols, MatchesNormalEquationsOracle) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = synthetic(seed, 25 + seed, {1, 0.2, -0.7, 0.1, 0.4}, 0.5);
        const auto r = ols_fit(kNames, d.cols, d.y);
        const auto o = oracle::ols_normal_equations(d.cols, d.y);
        for (std::size_t j = 0; j < o.beta.size(); ++j) {
            EXPECT_NEAR(r.coefficients[j].value, o.beta[j], 1e-9 * std::max(1.0, std::fabs(o.beta[j])));
            EXPECT_NEAR(r.coefficients[j].std_error, o.se[j], 1e-9 * std::max(1.0, o.se[j]));
        }
        EXPECT_NEAR(r.r_square, o.r_square, 1e-9);
    }
}

TEST(Ols, StandardizationRescalesCoefficientsOnly) {
    const auto d = synthetic(7, 80, {0.3, 1, -1, 0.5, 2}, 1.0);
    const auto raw = ols_fit(kNames, d.cols, d.y);
    auto scaled_cols = d.cols;
    std::vector<double> scales;
    for (auto& c : scaled_cols) {
        const auto s = stats::standardize(c);
        scales.push_back(s.scale);
        c = s.values;
    }
    const auto ys = stats::standardize(d.y);
    const auto scaled = ols_fit(kNames, scaled_cols, ys.values);
    EXPECT_NEAR(scaled.r_square, raw.r_square, 1e-12);
    for (std::size_t j = 0; j < raw.coefficients.size(); ++j) {
        EXPECT_NEAR(scaled.coefficients[j].t, raw.coefficients[j].t, 1e-9 * std::max(1.0, std::fabs(raw.coefficients[j].t)));
        const double factor = (j == 0 ? 1.0 : scales[j - 1]) / ys.scale;
        EXPECT_NEAR(scaled.coefficients[j].value, raw.coefficients[j].value * factor,
                    1e-9 * std::max(1.0, std::fabs(scaled.coefficients[j].value)));
    }
}

TEST(Ols, CoverageOfTrueCoefficients) {
    const std::vector<double> beta{0.3, 1, -1, 0.5, 2};
    std::size_t covered = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const auto d = synthetic(1000 + seed, 50, beta, 2.0);
        const auto r = ols_fit(kNames, d.cols, d.y);
        for (std::size_t j = 0; j < beta.size(); ++j, ++total)
            if (std::fabs(r.coefficients[j].value - beta[j]) <= 3.0 * r.coefficients[j].std_error) ++covered;
    }
    EXPECT_GE(static_cast<double>(covered) / static_cast<double>(total), 0.99);
}

TEST(PriceImpactRegression, ModelsAndErrors) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<ImpactObservation> rows;
    for (int i = 0; i < 60; ++i) {
        ImpactObservation o;
        o.side = i % 2 ? Side::Sell : Side::Buy;
        o.float_cap = 1000 + 300 * z(gen);
        o.c = std::fabs(50 + 20 * z(gen));
        o.prior_volatility = std::fabs(1e-3 * (1 + 0.3 * z(gen)));
        o.pi = 1e-4 * o.c + 0.2 * o.prior_volatility + (o.side == Side::Sell ? 1e-3 : 0.0) + 1e-4 * z(gen);
        o.full_filled = i % 3 != 0;
        rows.push_back(o);
    }
    const auto pooled = regress_price_impact(rows, ImpactModel::Pooled, false);
    EXPECT_EQ(pooled.n_rows, 60u);
    EXPECT_GT(pooled.at("beta3").t, 3.0);
    EXPECT_GT(pooled.at("beta2").t, 3.0);
    const auto buys = regress_price_impact(rows, ImpactModel::Purchases, false);
    EXPECT_EQ(buys.n_rows, 30u);
    EXPECT_THROW(buys.at("beta3"), std::out_of_range);
    EXPECT_EQ(regress_price_impact(rows, ImpactModel::Sales, true).n_rows, 20u);

    for (auto& r : rows) r.side = Side::Buy;
    EXPECT_THROW(regress_price_impact(rows, ImpactModel::Pooled, false), SingularDesignError);
    for (auto& r : rows) r.float_cap = 500;
    EXPECT_THROW(regress_price_impact(rows, ImpactModel::Purchases, false), SingularDesignError);
    EXPECT_THROW(regress_price_impact(std::span(rows).first(4), ImpactModel::Purchases, false), NumericalError);
    EXPECT_EQ(model_name(ImpactModel::Pooled), "all");
}
