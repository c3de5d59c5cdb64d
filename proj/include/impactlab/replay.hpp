#pragma once

// Replays a stock-day through the order book and extracts the institutional
// effective-market orders with everything the impact analyses need.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impactlab/order_book.hpp"
#include "impactlab/price_series.hpp"
#include "impactlab/types.hpp"

namespace impactlab {

struct ReplayConfig {
    double tick_size_cny = kDefaultTickSizeCny;
    Millis volatility_lookback_ms = 60'000;
};

enum class ReferenceSource { Mid, LastTrade };

struct InstitutionalTransaction {
    std::string stock_code;
    std::uint64_t seq = 0;
    OrderId order_id = 0;
    Side side = Side::Buy;
    Shares submitted = 0;
    Shares immediate_volume = 0;  // executed on arrival; C is computed for this volume
    Shares volume = 0;            // V: all component trades, including later fills of the remainder

    std::vector<std::size_t> trades;  // tape indices, arrival fills first
    std::size_t immediate_trades = 0;

    double reference_ticks = 0.0;  // P_r
    ReferenceSource reference_source = ReferenceSource::Mid;
    double vwap_ticks = 0.0;       // P_VWT
    double pi = 0.0;

    std::optional<BookStructureValue> c_before;  // pre-arrival book
    std::optional<double> prior_volatility;      // V_p
    bool full_filled = false;
    Millis anchor_ms = 0;
    std::optional<TrendKind> trend;
};

struct ReplayExclusions {
    std::size_t rejected_events = 0;
    std::size_t no_reference = 0;  // institutional orders dropped: no mid and no prior trade
    std::size_t no_c = 0;          // transactions kept, C undefined (one-sided book)
    std::size_t no_prior_volatility = 0;
};

struct StockReplay {
    std::string stock_code;
    std::vector<Trade> tape;
    /// C of each trade for its own size and side on the book before its aggressor arrived (half-tick-shares).
    std::vector<std::optional<std::int64_t>> trade_c;
    std::vector<std::optional<double>> returns;
    std::vector<InstitutionalTransaction> transactions;
    ReplayExclusions exclusions;
    std::vector<std::string> diagnostics;
    BookTotals totals;
    Shares resting_at_close = 0;
    OrderBook book;
};

/// Replays one stock's events (already ordered and session-filtered).
StockReplay replay_stock(std::span<const OrderEvent> events, const ReplayConfig& config = {});

/// Session-filters, groups by stock and replays each stock independently on up
/// to `jobs` threads. Output is ordered by stock code.
std::vector<StockReplay> replay_all(std::span<const OrderEvent> events, const ReplayConfig& config = {},
                                    unsigned jobs = 1);

/// Tags each transaction with the trend segment containing `date`.
void assign_trend(std::vector<InstitutionalTransaction>& transactions, Date date,
                  std::span<const TrendSegment> segments);

}  // namespace impactlab
