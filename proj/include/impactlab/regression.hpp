#pragma once

// Ordinary least squares and the price-impact regression built on it.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactlab/stats.hpp"
#include "impactlab/types.hpp"

namespace impactlab {

struct Coefficient {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    double t = 0.0;
    stats::Significance signif = stats::Significance::None;
};

struct RegressionResult {
    std::vector<Coefficient> coefficients;  // intercept first
    double r_square = 0.0;
    std::size_t n_rows = 0;
    std::size_t dof = 0;  // n_rows - parameters
    std::vector<double> residuals;

    const Coefficient& at(std::string_view name) const;
};

/// OLS with an intercept named "alpha". `columns[j]` is regressor j, one value
/// per row. Classical homoskedastic standard errors. Throws SingularDesignError
/// on a rank-deficient design and NumericalError when rows < regressors + 2 or
/// the response is constant.
RegressionResult ols_fit(std::span<const std::string> names, std::span<const std::vector<double>> columns,
                         std::span<const double> response);

/// One institutional transaction as a regression row, unscaled.
struct ImpactObservation {
    double pi = 0.0;
    double float_cap = 0.0;  // C_f
    double c = 0.0;          // order-book structure variable
    double prior_volatility = 0.0;
    Side side = Side::Buy;
    bool full_filled = false;
};

enum class ImpactModel { Pooled, Purchases, Sales };

std::string_view model_name(ImpactModel m);

/// PI = alpha + beta1 C_f + beta2 C + beta3 S + beta4 V_p, with PI, C_f, C and
/// V_p divided by their population standard deviations over the rows used.
/// S (1 = sell) only enters the pooled model.
RegressionResult regress_price_impact(std::span<const ImpactObservation> rows, ImpactModel model,
                                      bool full_filled_only);

}  // namespace impactlab
