#include "impactlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "impactlab/csv.hpp"
#include "impactlab/errors.hpp"
#include "impactlab/order_book.hpp"

namespace impactlab {

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::int64_t Rng::geometric(double p) {
    if (p >= 1.0) return 0;
    return static_cast<std::int64_t>(std::floor(std::log1p(-uniform()) / std::log1p(-p)));
}

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void FlowConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw UsageError(std::string("flow config: ") + what);
    };
    require(duration_ms > 0 && duration_ms <= 4 * 3600 * 1000, "duration_ms must lie in (0, 4h]");
    require(submit_rate > 0.0, "submit_rate must be positive");
    require(cancel_rate >= 0.0, "cancel_rate must be non-negative");
    require(placement_mean_ticks >= 0.0, "placement_mean_ticks must be non-negative");
    require(individual_market_prob >= 0.0 && individual_market_prob <= 1.0, "individual_market_prob must lie in [0, 1]");
    require(size_min_lots >= 1 && size_max_lots >= size_min_lots, "need 1 <= size_min_lots <= size_max_lots");
    require(size_shape > 0.0, "size_shape must be positive");
    require(lot_size >= 1, "lot_size must be positive");
    require(institution_fraction >= 0.0 && institution_fraction <= 1.0, "institution_fraction must lie in [0, 1]");
    require(institution_size_multiplier >= 1.0, "institution_size_multiplier must be >= 1");
    require(institution_market_prob >= 0.0 && institution_market_prob <= 1.0,
            "institution_market_prob must lie in [0, 1]");
    require(institution_sweep_ticks >= 0, "institution_sweep_ticks must be non-negative");
    require(bid_depth_ratio > 0.0, "bid_depth_ratio must be positive");
    require(base_price_ticks > 0, "base_price_ticks must be positive");
    require(!stock_code.empty() && stock_code.find(',') == std::string::npos, "stock_code must be a plain token");
}

namespace {

template <class T>
void set_number(const std::string& key, std::string_view value, T& field) {
    if constexpr (std::is_floating_point_v<T>) {
        auto v = csv::parse_double(value);
        if (!v) throw UsageError("flow config: bad number for " + key);
        field = *v;
    } else if constexpr (std::is_signed_v<T>) {
        auto v = csv::parse_int(value);
        if (!v) throw UsageError("flow config: bad integer for " + key);
        field = static_cast<T>(*v);
    } else {
        auto v = csv::parse_uint(value);
        if (!v) throw UsageError("flow config: bad integer for " + key);
        field = static_cast<T>(*v);
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Each field once: name, then member.
template <class F>
void for_each_field(FlowConfig& c, F&& f) {
    f("seed", c.seed);
    f("duration_ms", c.duration_ms);
    f("max_events", c.max_events);
    f("submit_rate", c.submit_rate);
    f("cancel_rate", c.cancel_rate);
    f("placement_mean_ticks", c.placement_mean_ticks);
    f("individual_market_prob", c.individual_market_prob);
    f("size_min_lots", c.size_min_lots);
    f("size_max_lots", c.size_max_lots);
    f("size_shape", c.size_shape);
    f("lot_size", c.lot_size);
    f("institution_fraction", c.institution_fraction);
    f("institution_size_multiplier", c.institution_size_multiplier);
    f("institution_market_prob", c.institution_market_prob);
    f("institution_sweep_ticks", c.institution_sweep_ticks);
    f("bid_depth_ratio", c.bid_depth_ratio);
    f("base_price_ticks", c.base_price_ticks);
}

}  // namespace

FlowConfig parse_flow_config(std::istream& in, FlowConfig config) {
    std::string line;
    std::size_t lineno = 0;
    while (csv::read_line(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("flow config: line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));
        if (key == "stock_code") {
            config.stock_code = std::string(value);
            continue;
        }
        bool known = false;
        for_each_field(config, [&](const char* name, auto& field) {
            if (key == name) {
                set_number(key, value, field);
                known = true;
            }
        });
        if (!known) throw UsageError("flow config: unknown key '" + key + "'");
    }
    config.validate();
    return config;
}

void write_flow_config(std::ostream& out, const FlowConfig& config) {
    FlowConfig c = config;
    out << "stock_code = " << c.stock_code << '\n';
    for_each_field(c, [&](const char* name, auto& field) {
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(field)>>)
            out << name << " = " << csv::fmt(field) << '\n';
        else
            out << name << " = " << field << '\n';
    });
}

std::vector<OrderEvent> gen_flow(const FlowConfig& config) {
    config.validate();
    Rng rng(config.seed);
    OrderBook book;
    std::vector<OrderEvent> out;

    struct Candidate {
        OrderId id;
        Side side;
        TraderType trader_type;
        std::string trader_id;
    };
    std::vector<Candidate> candidates;  // may hold dead ids, pruned lazily

    const double submit_per_ms = 2.0 * config.submit_rate / 1000.0;
    const double hazard_per_ms = config.cancel_rate / 1000.0;
    const double placement_p = 1.0 / (1.0 + config.placement_mean_ticks);
    const Millis morning_len = kMorningSession.end_ms - kMorningSession.start_ms;
    std::optional<Ticks> last_trade;
    std::uint64_t seq = 0;
    OrderId next_id = 0;
    double elapsed = 0.0;

    auto draw_lots = [&] {
        // Pareto with lower bound size_min_lots, truncated at size_max_lots.
        const double x = static_cast<double>(config.size_min_lots) * std::pow(1.0 - rng.uniform(), -1.0 / config.size_shape);
        return std::min<Shares>(config.size_max_lots, static_cast<Shares>(std::floor(x)));
    };
    // Individual volume resting on, or aimed at, the thinned side is scaled down.
    const bool thinned = config.bid_depth_ratio != 1.0;
    const Side thin_side = config.bid_depth_ratio < 1.0 ? Side::Buy : Side::Sell;
    const double thin_scale = std::min(config.bid_depth_ratio, 1.0 / config.bid_depth_ratio);

    while (true) {
        // Submits arrive at a fixed rate, each live order is canceled at a constant hazard.
        const double cancel_per_ms = hazard_per_ms * static_cast<double>(book.order_count());
        elapsed += rng.exponential(submit_per_ms + cancel_per_ms);
        if (elapsed >= static_cast<double>(config.duration_ms)) break;
        if (config.max_events && out.size() >= config.max_events) break;
        const auto clock = static_cast<Millis>(elapsed);
        const Millis ts = clock < morning_len ? kMorningSession.start_ms + clock
                                              : kAfternoonSession.start_ms + (clock - morning_len);

        OrderEvent e;
        e.stock_code = config.stock_code;
        e.seq = ++seq;
        e.timestamp_ms = ts;

        if (rng.uniform() * (submit_per_ms + cancel_per_ms) >= submit_per_ms) {
            while (!candidates.empty()) {
                const auto k = static_cast<std::size_t>(rng.below(candidates.size()));
                const Candidate c = candidates[k];
                candidates[k] = candidates.back();
                candidates.pop_back();
                if (!book.contains(c.id)) continue;
                e.order_id = c.id;
                e.side = c.side;
                e.action = Action::Cancel;
                e.trader_type = c.trader_type;
                e.trader_id = c.trader_id;
                break;
            }
            if (e.action == Action::Cancel) {
                book.apply(e);
                out.push_back(std::move(e));
                continue;
            }
        }

        e.action = Action::Submit;
        e.order_id = ++next_id;
        e.side = rng.bernoulli(0.5) ? Side::Buy : Side::Sell;
        const bool institution = rng.bernoulli(config.institution_fraction);
        e.trader_type = institution ? TraderType::Institution : TraderType::Individual;
        e.trader_id = institution ? "I" + std::to_string(rng.below(50)) : "P" + std::to_string(rng.below(1000));

        Shares lots = draw_lots();
        if (institution)
            lots = std::max<Shares>(1, static_cast<Shares>(std::llround(static_cast<double>(lots) *
                                                                        config.institution_size_multiplier)));
        const bool aggressive =
            rng.bernoulli(institution ? config.institution_market_prob : config.individual_market_prob);

        const Quotes q = book.best_quotes();
        const auto opp_best = e.side == Side::Buy ? q.best_ask : q.best_bid;
        const bool crossing = aggressive && opp_best.has_value();
        if (crossing) {
            const Ticks sweep = institution ? static_cast<Ticks>(rng.below(static_cast<std::uint64_t>(config.institution_sweep_ticks) + 1)) : 0;
            e.price = e.side == Side::Buy ? *opp_best + sweep : std::max<Ticks>(1, *opp_best - sweep);
        } else {
            const Ticks offset = rng.geometric(placement_p);
            const Ticks fallback = last_trade.value_or(config.base_price_ticks);
            if (e.side == Side::Buy) {
                const Ticks anchor = q.mid_half_ticks ? *q.mid_half_ticks / 2
                                     : q.best_bid     ? *q.best_bid
                                     : q.best_ask     ? *q.best_ask - 1
                                                      : fallback;
                e.price = std::max<Ticks>(1, anchor - offset);
            } else {
                const Ticks anchor = q.mid_half_ticks ? (*q.mid_half_ticks + 1) / 2
                                     : q.best_ask     ? *q.best_ask
                                     : q.best_bid     ? *q.best_bid + 1
                                                      : fallback;
                e.price = anchor + offset;
            }
        }
        const bool touches_thin = thinned && (crossing ? e.side != thin_side : e.side == thin_side);
        if (!institution && touches_thin)
            lots = std::max<Shares>(1, std::llround(static_cast<double>(lots) * thin_scale));
        e.size = lots * config.lot_size;

        const auto result = book.apply(e);
        if (!result.trades.empty()) last_trade = result.trades.back().price;
        if (result.rested > 0) candidates.push_back({e.order_id, e.side, e.trader_type, e.trader_id});
        out.push_back(std::move(e));
    }
    return out;
}

SyntheticMarket gen_market(const FlowConfig& config, std::size_t n_stocks) {
    config.validate();
    if (n_stocks == 0) throw UsageError("synthetic market needs at least one stock");
    Rng master(config.seed);
    std::vector<std::vector<OrderEvent>> streams;
    std::vector<double> caps;
    for (std::size_t i = 0; i < n_stocks; ++i) {
        FlowConfig c = config;
        c.seed = master.next();
        char code[24];
        std::snprintf(code, sizeof code, "%06zu", i + 1);
        c.stock_code = code;
        streams.push_back(gen_flow(c));
        caps.push_back(std::round((500.0 + 4500.0 * master.uniform()) * 10.0) / 10.0);
    }

    SyntheticMarket market;
    std::vector<std::size_t> pos(n_stocks, 0);
    std::uint64_t seq = 0;
    while (true) {
        std::size_t pick = n_stocks;
        for (std::size_t i = 0; i < n_stocks; ++i) {
            if (pos[i] == streams[i].size()) continue;
            if (pick == n_stocks || streams[i][pos[i]].timestamp_ms < streams[pick][pos[pick]].timestamp_ms) pick = i;
        }
        if (pick == n_stocks) break;
        OrderEvent e = std::move(streams[pick][pos[pick]++]);
        e.seq = ++seq;
        market.events.push_back(std::move(e));
    }
    market.summaries = summarize_institutional_orders(market.events);
    for (auto& s : market.summaries) {
        const auto i = static_cast<std::size_t>(std::stoul(s.stock_code)) - 1;
        s.float_cap = caps[i];
    }
    return market;
}

std::vector<DailyClose> gen_price_series(std::span<const SegmentSpec> spec, double noise, std::uint64_t seed,
                                         double base_price, Date start) {
    if (spec.empty()) throw UsageError("price series spec is empty");
    if (!(base_price > 0.0) || noise < 0.0) throw UsageError("price series: bad base price or noise");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& s = spec[i];
        if (s.n_days == 0) throw UsageError("price series: segment with zero days");
        const bool sign_ok = s.kind == TrendKind::Drawup ? s.magnitude > 0.0 : s.magnitude < 0.0;
        if (!sign_ok) throw UsageError("price series: magnitude sign does not match kind");
        if (i > 0 && spec[i - 1].kind == s.kind) throw UsageError("price series: segment kinds must alternate");
    }

    Rng rng(seed);
    std::vector<DailyClose> out;
    double log_price = std::log(base_price);
    Date date = start;
    out.push_back({date, base_price, base_price});
    for (const auto& s : spec) {
        const double step = s.magnitude / static_cast<double>(s.n_days);
        for (std::size_t d = 0; d < s.n_days; ++d) {
            log_price += step;
            date = next_weekday(date);
            const double px = std::exp(log_price + (noise > 0.0 ? noise * rng.normal() : 0.0));
            out.push_back({date, px, px});
        }
    }
    return out;
}

}  // namespace impactlab
