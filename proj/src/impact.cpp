#include "impactlab/impact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "impactlab/errors.hpp"

namespace impactlab {

double vwap_ticks(std::span<const Trade> trades) {
    // Exact integer notional; a day's volume times a tick price fits comfortably in 64 bits.
    std::int64_t notional = 0;
    Shares volume = 0;
    for (const auto& t : trades) {
        notional += t.price * t.size;
        volume += t.size;
    }
    if (volume <= 0) throw NumericalError("vwap: zero executed volume");
    return static_cast<double>(notional) / static_cast<double>(volume);
}

double price_impact(std::span<const Trade> trades, double reference_ticks, Side side) {
    if (!(reference_ticks > 0.0)) throw NumericalError("price_impact: reference price must be positive");
    std::int64_t notional = 0;
    Shares volume = 0;
    for (const auto& t : trades) {
        notional += t.price * t.size;
        volume += t.size;
    }
    if (volume <= 0) throw NumericalError("vwap: zero executed volume");
    // ln(P_VWT / P_r) as log1p of the excess notional, which is exact for tick and half-tick references
    const double base = reference_ticks * static_cast<double>(volume);
    const double d = std::log1p((static_cast<double>(notional) - base) / base);
    return side == Side::Buy ? d : -d;
}

std::vector<std::optional<double>> trade_returns(std::span<const Trade> tape) {
    std::vector<std::optional<double>> out(tape.size());
    for (std::size_t i = 1; i < tape.size(); ++i)
        out[i] = std::log(static_cast<double>(tape[i].price)) - std::log(static_cast<double>(tape[i - 1].price));
    return out;
}

std::optional<double> prior_volatility(std::span<const Trade> tape, std::span<const std::optional<double>> returns,
                                       Millis anchor_ms, Millis lookback_ms) {
    auto by_time = [](const Trade& t, Millis ts) { return t.timestamp_ms < ts; };
    auto lo = std::lower_bound(tape.begin(), tape.end(), anchor_ms - lookback_ms, by_time);
    auto hi = std::lower_bound(lo, tape.end(), anchor_ms, by_time);
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = lo; it != hi; ++it) {
        const auto& r = returns[static_cast<std::size_t>(it - tape.begin())];
        if (!r) continue;
        sum += std::fabs(*r);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

VolumeSplit split_by_volume(std::span<const VolumeKey> keys) {
    std::vector<VolumeKey> sorted(keys.begin(), keys.end());
    std::sort(sorted.begin(), sorted.end(), [](const VolumeKey& a, const VolumeKey& b) {
        return std::tie(a.volume, a.anchor_ms, a.order_id, a.index) <
               std::tie(b.volume, b.anchor_ms, b.order_id, b.index);
    });
    VolumeSplit out;
    const std::size_t n_small = sorted.size() / 2;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        (i < n_small ? out.small : out.large).push_back(sorted[i].index);
    return out;
}

std::vector<ImpactAsymmetryRow> impact_asymmetry(std::span<const InstitutionalTransaction> transactions) {
    struct Samples {
        std::vector<double> buy, sell;
    };
    std::map<std::pair<std::string, TrendKind>, Samples> groups;
    std::map<TrendKind, Samples> total;
    for (const auto& tx : transactions) {
        if (!tx.trend) continue;
        auto& g = groups[{tx.stock_code, *tx.trend}];
        auto& t = total[*tx.trend];
        (tx.side == Side::Buy ? g.buy : g.sell).push_back(tx.pi);
        (tx.side == Side::Buy ? t.buy : t.sell).push_back(tx.pi);
    }

    auto row = [](std::string stock, TrendKind kind, const Samples& s) {
        ImpactAsymmetryRow r;
        r.stock_code = std::move(stock);
        r.trend = kind;
        r.n_buy = s.buy.size();
        r.n_sell = s.sell.size();
        r.mean_pi_buy = s.buy.empty() ? 0.0 : stats::mean(s.buy);
        r.mean_pi_sell = s.sell.empty() ? 0.0 : stats::mean(s.sell);
        if (s.buy.size() >= 2 && s.sell.size() >= 2) r.t = stats::welch_t(s.buy, s.sell);
        return r;
    };

    std::vector<ImpactAsymmetryRow> out;
    for (const auto& [kind, s] : total) out.push_back(row("Total", kind, s));
    for (const auto& [key, s] : groups) out.push_back(row(key.first, key.second, s));
    return out;
}

}  // namespace impactlab
