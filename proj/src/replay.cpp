#include "impactlab/replay.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

#include "impactlab/impact.hpp"
#include "impactlab/ingest.hpp"

namespace impactlab {

StockReplay replay_stock(std::span<const OrderEvent> events, const ReplayConfig& config) {
    StockReplay out;
    if (!events.empty()) out.stock_code = events.front().stock_code;
    OrderBook& book = out.book;
    // order id -> transaction whose remainder is still resting
    std::unordered_map<OrderId, std::size_t> open_remainders;

    for (const auto& e : events) {
        if (e.action == Action::Cancel) {
            auto r = book.apply(e);
            if (r.rejection) {
                ++out.exclusions.rejected_events;
                out.diagnostics.push_back("seq " + std::to_string(e.seq) + ": " + *r.rejection);
            }
            open_remainders.erase(e.order_id);
            continue;
        }

        const Quotes before = book.best_quotes();
        const auto opposite_best = e.side == Side::Buy ? before.best_ask : before.best_bid;
        const bool crossing =
            opposite_best && (e.side == Side::Buy ? *opposite_best <= e.price : *opposite_best >= e.price);
        std::vector<PriceLevel> ladder;
        if (crossing) ladder = book.opposite_ladder(e.side, e.size);

        auto result = book.apply(e);
        if (result.rejection) {
            ++out.exclusions.rejected_events;
            out.diagnostics.push_back("seq " + std::to_string(e.seq) + ": " + *result.rejection);
            continue;
        }

        const std::size_t first_index = out.tape.size();
        Shares immediate = 0;
        for (const auto& t : result.trades) {
            const std::size_t idx = out.tape.size();
            out.tape.push_back(t);
            out.trade_c.push_back(before.mid_half_ticks
                                      ? std::optional(compute_structure(ladder, e.side, *before.mid_half_ticks, t.size)
                                                          .c_half_tick_shares)
                                      : std::nullopt);
            immediate += t.size;
            if (auto it = open_remainders.find(t.resting_order_id); it != open_remainders.end()) {
                auto& tx = out.transactions[it->second];
                tx.trades.push_back(idx);
                tx.volume += t.size;
                if (!book.contains(t.resting_order_id)) open_remainders.erase(it);
            }
        }

        if (e.trader_type != TraderType::Institution || result.trades.empty()) continue;

        InstitutionalTransaction tx;
        tx.stock_code = e.stock_code;
        tx.seq = e.seq;
        tx.order_id = e.order_id;
        tx.side = e.side;
        tx.submitted = e.size;
        tx.immediate_volume = immediate;
        tx.volume = immediate;
        tx.immediate_trades = result.trades.size();
        for (std::size_t i = 0; i < result.trades.size(); ++i) tx.trades.push_back(first_index + i);
        tx.full_filled = classify_order(e, result.trades).full_filled;
        tx.anchor_ms = result.trades.front().timestamp_ms;

        if (before.mid_half_ticks) {
            tx.reference_ticks = *before.mid_half_ticks / 2.0;
            tx.reference_source = ReferenceSource::Mid;
            tx.c_before = compute_structure(ladder, e.side, *before.mid_half_ticks, immediate);
        } else {
            ++out.exclusions.no_c;
            std::optional<Ticks> prior;
            if (first_index > 0) prior = out.tape[first_index - 1].price;
            if (!prior) {
                ++out.exclusions.no_reference;
                --out.exclusions.no_c;
                continue;
            }
            tx.reference_ticks = static_cast<double>(*prior);
            tx.reference_source = ReferenceSource::LastTrade;
        }
        if (result.rested > 0) open_remainders[e.order_id] = out.transactions.size();
        out.transactions.push_back(std::move(tx));
    }

    out.returns = trade_returns(out.tape);
    for (auto& tx : out.transactions) {
        std::vector<Trade> component;
        component.reserve(tx.trades.size());
        for (std::size_t i : tx.trades) component.push_back(out.tape[i]);
        tx.vwap_ticks = vwap_ticks(component);
        tx.pi = price_impact(component, tx.reference_ticks, tx.side);
        tx.prior_volatility = prior_volatility(out.tape, out.returns, tx.anchor_ms, config.volatility_lookback_ms);
        if (!tx.prior_volatility) ++out.exclusions.no_prior_volatility;
    }
    out.totals = book.totals();
    out.resting_at_close = book.resting_volume(Side::Buy) + book.resting_volume(Side::Sell);
    return out;
}

std::vector<StockReplay> replay_all(std::span<const OrderEvent> events, const ReplayConfig& config, unsigned jobs) {
    const auto filtered = session_events(events);
    auto groups = group_by_stock(filtered);
    std::vector<const std::vector<OrderEvent>*> inputs;
    for (const auto& [_, g] : groups) inputs.push_back(&g);

    std::vector<StockReplay> out(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) out[i] = replay_stock(*inputs[i], config);
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

void assign_trend(std::vector<InstitutionalTransaction>& transactions, Date date,
                  std::span<const TrendSegment> segments) {
    const auto kind = trend_on(segments, date);
    for (auto& tx : transactions) tx.trend = kind;
}

}  // namespace impactlab
