#include "impactlab/event_study.hpp"

#include <algorithm>
#include <cmath>

#include "impactlab/errors.hpp"
#include "impactlab/impact.hpp"

namespace impactlab {

void EventWindow::validate() const {
    if (bin_ms <= 0 || window_ms <= 0) throw UsageError("event window and bin must be positive");
    if (window_ms % bin_ms != 0) throw UsageError("event window must be a multiple of the bin size");
}

std::string EventWindow::label(std::size_t bin) const {
    const std::size_t half = bins_per_side();
    auto sec = [](Millis ms) {
        const Millis whole = ms / 1000;
        if (whole * 1000 == ms) return std::to_string(whole);
        std::string s = std::to_string(static_cast<double>(ms) / 1000.0);
        while (s.back() == '0') s.pop_back();
        return s;
    };
    if (bin == half) return "0";
    if (bin < half) {
        const Millis lo = -window_ms + static_cast<Millis>(bin) * bin_ms;
        return "[" + sec(lo) + "," + sec(lo + bin_ms) + ")";
    }
    const Millis lo = static_cast<Millis>(bin - half - 1) * bin_ms;
    return "(" + sec(lo) + "," + sec(lo + bin_ms) + "]";
}

std::string_view subset_name(VolumeSubset s) {
    switch (s) {
        case VolumeSubset::SmallV: return "small_v";
        case VolumeSubset::LargeV: return "large_v";
        case VolumeSubset::Total: return "total";
    }
    return "";
}

std::vector<TransactionRef> all_transactions(std::span<const StockReplay> replays) {
    std::vector<TransactionRef> out;
    for (std::size_t r = 0; r < replays.size(); ++r)
        for (std::size_t t = 0; t < replays[r].transactions.size(); ++t) out.push_back({r, t});
    return out;
}

EventStudyTable event_study(std::span<const StockReplay> replays, std::span<const TransactionRef> selected,
                            VolumeSubset subset, const EventWindow& window, double tick_size_cny) {
    window.validate();
    const std::size_t n_bins = window.bin_count();
    const std::size_t zero = window.zero_bin();
    const auto half = static_cast<Millis>(window.bins_per_side());

    struct Samples {
        std::vector<double> r, abs_r, c;
    };
    std::vector<Samples> buy(n_bins), sell(n_bins);

    EventStudyTable table;
    table.subset = subset;

    for (const auto& ref : selected) {
        const StockReplay& rep = replays[ref.replay];
        const InstitutionalTransaction& tx = rep.transactions[ref.transaction];
        auto& side = tx.side == Side::Buy ? buy : sell;
        (tx.side == Side::Buy ? table.anchors_purchase : table.anchors_sale)++;

        const Millis anchor = tx.anchor_ms;
        if (auto s = session_of(anchor); !s || anchor - window.window_ms < s->start_ms || anchor + window.window_ms > s->end_ms)
            ++table.truncated;

        const std::size_t first_fill = tx.trades.front();
        const std::size_t last_fill = tx.trades[tx.immediate_trades - 1];
        auto push = [&](std::size_t bin, std::size_t trade) {
            if (const auto& r = rep.returns[trade]) {
                side[bin].r.push_back(*r);
                side[bin].abs_r.push_back(std::fabs(*r));
            }
            if (bin != zero)
                if (const auto& c = rep.trade_c[trade]) side[bin].c.push_back(static_cast<double>(*c) / 2.0 * tick_size_cny);
        };

        auto by_time = [](const Trade& t, Millis ts) { return t.timestamp_ms < ts; };
        const auto& tape = rep.tape;
        auto lo = std::lower_bound(tape.begin(), tape.end(), anchor - window.window_ms, by_time);
        for (auto it = lo; it != tape.end() && it->timestamp_ms <= anchor + window.window_ms; ++it) {
            const auto idx = static_cast<std::size_t>(it - tape.begin());
            if (idx >= first_fill && idx <= last_fill) {
                push(zero, idx);
                continue;
            }
            const Millis dt = it->timestamp_ms - anchor;
            std::size_t bin;
            if (dt < 0) {
                bin = static_cast<std::size_t>((dt + window.window_ms) / window.bin_ms);
            } else if (dt > 0) {
                bin = static_cast<std::size_t>(half + (dt + window.bin_ms - 1) / window.bin_ms);
            } else {
                bin = idx > last_fill ? zero + 1 : zero - 1;
            }
            push(bin, idx);
        }
        if (tx.c_before) side[zero].c.push_back(tx.c_before->c_cny(tick_size_cny));
    }

    auto summarize = [](const Samples& s) {
        BinSide b;
        b.count = s.r.size();
        b.c_count = s.c.size();
        if (!s.r.empty()) b.mean_r = stats::mean(s.r);
        if (!s.c.empty()) b.mean_c = stats::mean(s.c);
        return b;
    };
    for (std::size_t b = 0; b < n_bins; ++b) {
        EventBin bin;
        bin.label = window.label(b);
        bin.purchase = summarize(buy[b]);
        bin.sale = summarize(sell[b]);
        if (buy[b].abs_r.size() >= 2 && sell[b].abs_r.size() >= 2) bin.t = stats::welch_t(buy[b].abs_r, sell[b].abs_r);
        table.bins.push_back(std::move(bin));
    }

    auto anova = [](const std::vector<Samples>& side) -> std::optional<stats::AnovaResult> {
        std::vector<std::vector<double>> groups;
        for (const auto& s : side)
            if (!s.c.empty()) groups.push_back(s.c);
        try {
            return stats::anova_oneway(groups);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    };
    table.anova_purchase = anova(buy);
    table.anova_sale = anova(sell);
    return table;
}

std::vector<EventStudyTable> event_study_by_volume(std::span<const StockReplay> replays, const EventWindow& window,
                                                   double tick_size_cny) {
    const auto all = all_transactions(replays);
    std::vector<VolumeKey> keys;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& tx = replays[all[i].replay].transactions[all[i].transaction];
        keys.push_back({tx.volume, tx.anchor_ms, tx.order_id, i});
    }
    const auto split = split_by_volume(keys);
    auto pick = [&](const std::vector<std::size_t>& idx) {
        std::vector<TransactionRef> out;
        for (std::size_t i : idx) out.push_back(all[i]);
        // restore replay order so pooled sums do not depend on the sort
        std::sort(out.begin(), out.end(), [](const TransactionRef& a, const TransactionRef& b) {
            return std::pair(a.replay, a.transaction) < std::pair(b.replay, b.transaction);
        });
        return out;
    };
    return {event_study(replays, pick(split.small), VolumeSubset::SmallV, window, tick_size_cny),
            event_study(replays, pick(split.large), VolumeSubset::LargeV, window, tick_size_cny),
            event_study(replays, all, VolumeSubset::Total, window, tick_size_cny)};
}

}  // namespace impactlab
