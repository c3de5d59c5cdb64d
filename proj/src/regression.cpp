#include "impactlab/regression.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "impactlab/errors.hpp"

namespace impactlab {

const Coefficient& RegressionResult::at(std::string_view name) const {
    for (const auto& c : coefficients)
        if (c.name == name) return c;
    throw std::out_of_range("no coefficient named " + std::string(name));
}

RegressionResult ols_fit(std::span<const std::string> names, std::span<const std::vector<double>> columns,
                         std::span<const double> response) {
    const auto n = static_cast<Eigen::Index>(response.size());
    const auto p = static_cast<Eigen::Index>(columns.size()) + 1;
    if (names.size() != columns.size()) throw std::invalid_argument("ols_fit: names/columns mismatch");
    if (n < p + 1) throw NumericalError("ols_fit: need at least regressors + 2 rows");

    Eigen::MatrixXd x(n, p);
    x.col(0).setOnes();
    for (Eigen::Index j = 1; j < p; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j - 1)];
        if (static_cast<Eigen::Index>(col.size()) != n) throw std::invalid_argument("ols_fit: ragged column");
        x.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
    }
    const Eigen::Map<const Eigen::VectorXd> y(response.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw SingularDesignError("ols_fit: singular design (rank " + std::to_string(qr.rank()) +
                                                 " < " + std::to_string(p) + ")");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;

    const double ss_res = resid.squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    if (!(ss_tot > 0.0)) throw NumericalError("ols_fit: constant response");

    RegressionResult out;
    out.n_rows = static_cast<std::size_t>(n);
    out.dof = static_cast<std::size_t>(n - p);
    out.r_square = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    out.residuals.assign(resid.data(), resid.data() + n);

    const double sigma2 = ss_res / static_cast<double>(n - p);
    // (X'X)^-1 through the QR factor: R^-1 R^-T, permuted back.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();

    for (Eigen::Index j = 0; j < p; ++j) {
        Coefficient c;
        c.name = j == 0 ? "alpha" : names[static_cast<std::size_t>(j - 1)];
        c.value = beta(j);
        c.std_error = std::sqrt(sigma2 * cov(j, j));
        if (c.std_error > 0.0) {
            c.t = c.value / c.std_error;
        } else {
            c.t = c.value == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.value);
        }
        c.signif = stats::t_significance(c.t, static_cast<double>(out.dof));
        out.coefficients.push_back(std::move(c));
    }
    return out;
}

std::string_view model_name(ImpactModel m) {
    switch (m) {
        case ImpactModel::Pooled: return "all";
        case ImpactModel::Purchases: return "purchases";
        case ImpactModel::Sales: return "sales";
    }
    return "";
}

RegressionResult regress_price_impact(std::span<const ImpactObservation> rows, ImpactModel model,
                                      bool full_filled_only) {
    std::vector<double> pi, cf, c, vp, s;
    for (const auto& r : rows) {
        if (full_filled_only && !r.full_filled) continue;
        if (model == ImpactModel::Purchases && r.side != Side::Buy) continue;
        if (model == ImpactModel::Sales && r.side != Side::Sell) continue;
        pi.push_back(r.pi);
        cf.push_back(r.float_cap);
        c.push_back(r.c);
        vp.push_back(r.prior_volatility);
        s.push_back(r.side == Side::Sell ? 1.0 : 0.0);
    }
    const std::size_t needed = model == ImpactModel::Pooled ? 6 : 5;
    if (pi.size() < needed)
        throw NumericalError("price-impact regression: " + std::to_string(pi.size()) + " rows, need " +
                             std::to_string(needed));

    auto scaled = [](const std::vector<double>& v, const char* what) {
        try {
            return stats::standardize(v).values;
        } catch (const NumericalError&) {
            throw SingularDesignError(std::string("price-impact regression: ") + what + " has zero variance");
        }
    };
    const auto pi_s = stats::standardize(pi).values;
    std::vector<std::string> names{"beta1", "beta2"};
    std::vector<std::vector<double>> cols{scaled(cf, "C_f"), scaled(c, "C")};
    if (model == ImpactModel::Pooled) {
        names.push_back("beta3");
        cols.push_back(s);
    }
    names.push_back("beta4");
    cols.push_back(scaled(vp, "V_p"));
    return ols_fit(names, cols, pi_s);
}

}  // namespace impactlab
