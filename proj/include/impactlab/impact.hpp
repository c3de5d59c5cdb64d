#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impactlab/order_book.hpp"
#include "impactlab/price_series.hpp"
#include "impactlab/replay.hpp"
#include "impactlab/stats.hpp"

namespace impactlab {

/// Volume-weighted price of `trades`, in ticks. Throws NumericalError on zero volume.
double vwap_ticks(std::span<const Trade> trades);

/// ln P_VWT - ln P_r for buys, ln P_r - ln P_VWT for sells.
double price_impact(std::span<const Trade> trades, double reference_ticks, Side side);

/// Trade-by-trade log returns in event time; the first trade has none.
std::vector<std::optional<double>> trade_returns(std::span<const Trade> tape);

/// Mean |R| over trades stamped in [anchor - lookback, anchor). nullopt when
/// the window holds no return.
std::optional<double> prior_volatility(std::span<const Trade> tape, std::span<const std::optional<double>> returns,
                                       Millis anchor_ms, Millis lookback_ms = 60'000);

struct VolumeKey {
    Shares volume = 0;
    Millis anchor_ms = 0;
    OrderId order_id = 0;
    std::size_t index = 0;  // caller's handle
};

struct VolumeSplit {
    std::vector<std::size_t> small;  // handles
    std::vector<std::size_t> large;
};

/// Lower half by (volume, anchor, order id) is small; with an odd count the
/// median goes to the large half.
VolumeSplit split_by_volume(std::span<const VolumeKey> keys);

struct ImpactAsymmetryRow {
    std::string stock_code;  // "Total" for the pooled row
    TrendKind trend = TrendKind::Drawup;
    double mean_pi_buy = 0.0;
    double mean_pi_sell = 0.0;
    std::size_t n_buy = 0;
    std::size_t n_sell = 0;
    std::optional<stats::TTestResult> t;  // purchases minus sales
};

/// Mean PI of purchases vs sales per stock and trend context, plus pooled
/// "Total" rows first. Transactions without a trend context are skipped.
std::vector<ImpactAsymmetryRow> impact_asymmetry(std::span<const InstitutionalTransaction> transactions);

}  // namespace impactlab
