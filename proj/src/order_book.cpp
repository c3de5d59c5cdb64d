#include "impactlab/order_book.hpp"

#include <algorithm>

#include "impactlab/errors.hpp"

namespace impactlab {

BookStructureValue compute_structure(std::span<const PriceLevel> opposite, Side side, Ticks mid_half_ticks,
                                     Shares volume) {
    BookStructureValue out;
    out.side = side;
    out.volume = volume;
    out.mid_half_ticks = mid_half_ticks;
    Shares left = volume;
    for (const auto& level : opposite) {
        if (left <= 0) break;
        const Shares take = std::min(left, level.volume);
        const std::int64_t gap = side == Side::Buy ? 2 * level.price - mid_half_ticks
                                                   : mid_half_ticks - 2 * level.price;
        out.c_half_tick_shares += gap * take;
        ++out.levels;
        left -= take;
    }
    if (left > 0) throw InsufficientDepthError(volume, volume - left);
    return out;
}

template <class Ladder>
void OrderBook::match(Ladder& ladder, const OrderEvent& event, Shares& remaining, std::vector<Trade>& trades) {
    const bool buy = event.side == Side::Buy;
    while (remaining > 0 && !ladder.empty()) {
        auto level_it = ladder.begin();
        const Ticks price = level_it->first;
        if (buy ? price > event.price : price < event.price) break;
        Level& level = level_it->second;
        while (remaining > 0 && !level.queue.empty()) {
            Resting& head = level.queue.front();
            const Shares fill = std::min(remaining, head.remaining);
            trades.push_back(Trade{event.seq, event.timestamp_ms, price, fill, event.side, event.order_id, head.id,
                                   event.trader_type});
            remaining -= fill;
            head.remaining -= fill;
            level.volume -= fill;
            totals_.executed += fill;
            if (head.remaining == 0) {
                index_.erase(head.id);
                level.queue.pop_front();
            }
        }
        if (level.queue.empty()) ladder.erase(level_it);
    }
}

ApplyResult OrderBook::apply(const OrderEvent& event) {
    ApplyResult result;
    if (event.action == Action::Cancel) {
        auto it = index_.find(event.order_id);
        if (it == index_.end()) {
            result.rejection = "cancel of order " + std::to_string(event.order_id) + " that is not live";
            return result;
        }
        const Locator loc = it->second;
        auto erase_from = [&](auto& ladder) {
            auto level_it = ladder.find(loc.price);
            Level& level = level_it->second;
            result.canceled = loc.it->remaining;
            level.volume -= loc.it->remaining;
            level.queue.erase(loc.it);
            if (level.queue.empty()) ladder.erase(level_it);
        };
        if (loc.side == Side::Buy) erase_from(bids_);
        else erase_from(asks_);
        totals_.canceled += result.canceled;
        index_.erase(it);
        return result;
    }

    if (event.price <= 0 || event.size <= 0) {
        result.rejection = "submit with non-positive price or size";
        return result;
    }
    if (index_.contains(event.order_id)) {
        result.rejection = "submit reuses live order id " + std::to_string(event.order_id);
        return result;
    }

    totals_.submitted += event.size;
    Shares remaining = event.size;
    if (event.side == Side::Buy) match(asks_, event, remaining, result.trades);
    else match(bids_, event, remaining, result.trades);

    if (remaining > 0) {
        auto rest_on = [&](auto& ladder) {
            Level& level = ladder[event.price];
            level.queue.push_back(Resting{event.order_id, remaining, event.seq, event.trader_type});
            level.volume += remaining;
            index_.emplace(event.order_id, Locator{event.side, event.price, std::prev(level.queue.end())});
        };
        if (event.side == Side::Buy) rest_on(bids_);
        else rest_on(asks_);
        result.rested = remaining;
    }
    return result;
}

Quotes OrderBook::best_quotes() const {
    Quotes q;
    if (!bids_.empty()) q.best_bid = bids_.begin()->first;
    if (!asks_.empty()) q.best_ask = asks_.begin()->first;
    if (q.best_bid && q.best_ask) q.mid_half_ticks = *q.best_bid + *q.best_ask;
    return q;
}

std::vector<PriceLevel> OrderBook::opposite_ladder(Side aggressor, Shares min_volume) const {
    std::vector<PriceLevel> out;
    Shares covered = 0;
    auto walk = [&](const auto& ladder) {
        for (const auto& [price, level] : ladder) {
            if (covered >= min_volume && !out.empty()) break;
            out.push_back({price, level.volume});
            covered += level.volume;
        }
    };
    if (aggressor == Side::Buy) walk(asks_);
    else walk(bids_);
    return out;
}

BookStructureValue OrderBook::structure(Side aggressor, Shares volume) const {
    const Quotes q = best_quotes();
    if (!q.mid_half_ticks) throw UndefinedMidError();
    const auto ladder = opposite_ladder(aggressor, volume);
    return compute_structure(ladder, aggressor, *q.mid_half_ticks, volume);
}

DepthSnapshot OrderBook::depth(std::size_t n_levels) const {
    DepthSnapshot snap;
    auto take = [&](const auto& ladder, std::vector<PriceLevel>& out) {
        for (const auto& [price, level] : ladder) {
            if (out.size() >= n_levels) break;
            out.push_back({price, level.volume});
        }
    };
    take(bids_, snap.bids);
    take(asks_, snap.asks);
    return snap;
}

std::vector<BookOrder> OrderBook::orders(Side side) const {
    std::vector<BookOrder> out;
    auto walk = [&](const auto& ladder) {
        for (const auto& [price, level] : ladder)
            for (const auto& r : level.queue) out.push_back({r.id, price, r.remaining, r.seq, r.trader_type});
    };
    if (side == Side::Buy) walk(bids_);
    else walk(asks_);
    return out;
}

Shares OrderBook::resting_volume(Side side) const {
    Shares total = 0;
    auto sum = [&](const auto& ladder) {
        for (const auto& [_, level] : ladder) total += level.volume;
    };
    if (side == Side::Buy) sum(bids_);
    else sum(asks_);
    return total;
}

Classification classify_order(const OrderEvent& submit, std::span<const Trade> trades) {
    if (trades.empty()) return {OrderClass::PassiveLimit, false};
    Shares executed = 0;
    for (const auto& t : trades) executed += t.size;
    return {OrderClass::EffectiveMarket, executed == submit.size};
}

}  // namespace impactlab
