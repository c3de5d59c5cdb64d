#pragma once

// Price-time-priority continuous double auction for one stock-day.

#include <cstddef>
#include <list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "impactlab/types.hpp"

namespace impactlab {

struct Trade {
    std::uint64_t seq = 0;  // event index of the aggressor
    Millis timestamp_ms = 0;
    Ticks price = 0;        // resting order's limit
    Shares size = 0;
    Side aggressor_side = Side::Buy;
    OrderId aggressor_order_id = 0;
    OrderId resting_order_id = 0;
    TraderType aggressor_trader_type = TraderType::Individual;

    bool operator==(const Trade&) const = default;
};

struct Quotes {
    std::optional<Ticks> best_bid;
    std::optional<Ticks> best_ask;
    std::optional<Ticks> mid_half_ticks;  // best_bid + best_ask, i.e. mid in units of half a tick

    std::optional<double> mid_ticks() const {
        return mid_half_ticks ? std::optional<double>(*mid_half_ticks / 2.0) : std::nullopt;
    }
};

struct PriceLevel {
    Ticks price = 0;
    Shares volume = 0;

    bool operator==(const PriceLevel&) const = default;
};

struct DepthSnapshot {
    std::vector<PriceLevel> bids;  // best first
    std::vector<PriceLevel> asks;  // best first
};

/// Order-book structure variable for an order of `volume` shares hitting the
/// opposite side: sum over consumed levels of |level price - mid| times the
/// consumed volume, the last level counted only up to the cumulative volume.
/// Kept exact in half-tick-shares.
struct BookStructureValue {
    std::int64_t c_half_tick_shares = 0;
    int levels = 0;
    Side side = Side::Buy;  // aggressor side
    Shares volume = 0;
    Ticks mid_half_ticks = 0;

    double c_ticks() const { return static_cast<double>(c_half_tick_shares) / 2.0; }
    double c_cny(double tick_size = kDefaultTickSizeCny) const { return c_ticks() * tick_size; }
};

/// Walks `opposite` (best level first) for an aggressor on `side`.
/// Throws InsufficientDepthError when volume exceeds the ladder.
BookStructureValue compute_structure(std::span<const PriceLevel> opposite, Side side, Ticks mid_half_ticks,
                                     Shares volume);

struct BookOrder {
    OrderId id = 0;
    Ticks price = 0;
    Shares remaining = 0;
    std::uint64_t seq = 0;
    TraderType trader_type = TraderType::Individual;

    bool operator==(const BookOrder&) const = default;
};

struct BookTotals {
    Shares submitted = 0;
    Shares executed = 0;  // per trade, so buy- and sell-executed shares alike
    Shares canceled = 0;
};

struct ApplyResult {
    std::vector<Trade> trades;
    Shares rested = 0;                     // remainder placed on the book
    Shares canceled = 0;                   // remainder removed by a cancel
    std::optional<std::string> rejection;  // book untouched when set
};

class OrderBook {
public:
    // Resting-order locators point into the level queues, so copies are disallowed.
    OrderBook() = default;
    OrderBook(const OrderBook&) = delete;
    OrderBook& operator=(const OrderBook&) = delete;
    OrderBook(OrderBook&&) = default;
    OrderBook& operator=(OrderBook&&) = default;

    ApplyResult apply(const OrderEvent& event);

    Quotes best_quotes() const;

    /// compute_structure against the current book. Throws UndefinedMidError when
    /// either side is empty.
    BookStructureValue structure(Side aggressor, Shares volume) const;

    /// Opposite-side levels, best first, until at least `min_volume` is covered
    /// (all levels when the side is thinner).
    std::vector<PriceLevel> opposite_ladder(Side aggressor, Shares min_volume) const;

    DepthSnapshot depth(std::size_t n_levels) const;

    /// Resting orders of one side in matching priority.
    std::vector<BookOrder> orders(Side side) const;

    bool contains(OrderId id) const { return index_.contains(id); }
    std::size_t order_count() const { return index_.size(); }
    Shares resting_volume(Side side) const;
    const BookTotals& totals() const { return totals_; }

private:
    struct Resting {
        OrderId id;
        Shares remaining;
        std::uint64_t seq;
        TraderType trader_type;
    };
    struct Level {
        std::list<Resting> queue;
        Shares volume = 0;
    };
    struct Locator {
        Side side;
        Ticks price;
        std::list<Resting>::iterator it;
    };

    using BidLadder = std::map<Ticks, Level, std::greater<>>;
    using AskLadder = std::map<Ticks, Level, std::less<>>;

    template <class Ladder>
    void match(Ladder& ladder, const OrderEvent& event, Shares& remaining, std::vector<Trade>& trades);

    BidLadder bids_;
    AskLadder asks_;
    std::unordered_map<OrderId, Locator> index_;
    BookTotals totals_;
};

enum class OrderClass { PassiveLimit, EffectiveMarket };

struct Classification {
    OrderClass kind = OrderClass::PassiveLimit;
    bool full_filled = false;

    bool operator==(const Classification&) const = default;
};

/// Effective-market iff the submit traded on arrival; full-filled iff nothing rested.
Classification classify_order(const OrderEvent& submit, std::span<const Trade> trades);

}  // namespace impactlab
