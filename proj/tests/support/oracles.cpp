#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oracle {

std::optional<std::vector<Trade>> NaiveMatcher::apply(const OrderEvent& e) {
    auto live = [&](OrderId id) {
        return std::find_if(resting_.begin(), resting_.end(), [&](const Order& o) { return o.id == id; });
    };
    if (e.action == Action::Cancel) {
        auto it = live(e.order_id);
        if (it == resting_.end()) return std::nullopt;
        canceled += it->remaining;
        resting_.erase(it);
        return std::vector<Trade>{};
    }
    if (e.price <= 0 || e.size <= 0 || live(e.order_id) != resting_.end()) return std::nullopt;

    submitted += e.size;
    std::vector<Trade> trades;
    Shares left = e.size;
    while (left > 0) {
        // full scan for the best crossing counterparty
        auto best = resting_.end();
        for (auto it = resting_.begin(); it != resting_.end(); ++it) {
            if (it->side == e.side) continue;
            const bool crosses = e.side == Side::Buy ? it->price <= e.price : it->price >= e.price;
            if (!crosses) continue;
            if (best == resting_.end()) {
                best = it;
                continue;
            }
            const bool better = e.side == Side::Buy ? it->price < best->price : it->price > best->price;
            if (better || (it->price == best->price && it->arrival < best->arrival)) best = it;
        }
        if (best == resting_.end()) break;
        const Shares fill = std::min(left, best->remaining);
        trades.push_back(Trade{e.seq, e.timestamp_ms, best->price, fill, e.side, e.order_id, best->id, e.trader_type});
        left -= fill;
        executed += fill;
        best->remaining -= fill;
        if (best->remaining == 0) resting_.erase(best);
    }
    if (left > 0) resting_.push_back(Order{e.order_id, e.side, e.price, left, e.seq, arrivals_++, e.trader_type});
    return trades;
}

std::vector<BookOrder> NaiveMatcher::orders(Side side) const {
    std::vector<Order> mine;
    for (const auto& o : resting_)
        if (o.side == side) mine.push_back(o);
    std::sort(mine.begin(), mine.end(), [&](const Order& a, const Order& b) {
        if (a.price != b.price) return side == Side::Buy ? a.price > b.price : a.price < b.price;
        return a.arrival < b.arrival;
    });
    std::vector<BookOrder> out;
    for (const auto& o : mine) out.push_back(BookOrder{o.id, o.price, o.remaining, o.seq, o.trader_type});
    return out;
}

std::vector<OrderEvent> random_stream(std::uint64_t seed, std::size_t n, bool with_invalid) {
    std::mt19937_64 gen(seed);
    auto uni = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen); };
    std::vector<OrderEvent> out;
    std::vector<OrderId> ids;
    OrderId next = 1;
    Millis ts = hms_ms(9, 30);
    for (std::size_t i = 0; i < n; ++i) {
        OrderEvent e;
        e.stock_code = "600000";
        e.seq = i + 1;
        ts += uni(0, 3);
        e.timestamp_ms = ts;
        e.trader_type = uni(0, 9) == 0 ? TraderType::Institution : TraderType::Individual;
        e.trader_id = "t" + std::to_string(uni(0, 99));
        e.side = uni(0, 1) ? Side::Buy : Side::Sell;
        const auto roll = uni(0, 99);
        if (roll < 30 && !ids.empty()) {
            e.action = Action::Cancel;
            e.order_id = ids[static_cast<std::size_t>(uni(0, static_cast<std::int64_t>(ids.size()) - 1))];
        } else if (with_invalid && roll == 30) {
            e.action = Action::Cancel;
            e.order_id = next + 1000000;  // never submitted
        } else {
            e.action = Action::Submit;
            e.order_id = (with_invalid && roll == 31 && !ids.empty()) ? ids.back() : next++;
            e.price = 1000 + uni(-12, 12) + (e.side == Side::Buy ? -2 : 2);
            e.size = uni(1, 30) * 10;
            if (with_invalid && roll == 32) e.size = 0;
            ids.push_back(e.order_id);
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::optional<std::int64_t> brute_force_c(std::span<const BookOrder> opposite, Side aggressor, Ticks mid_half,
                                          Shares volume) {
    std::int64_t c = 0;
    Shares left = volume;
    for (const auto& o : opposite) {
        // one share at a time keeps the oracle free of any level bookkeeping
        for (Shares s = 0; s < o.remaining && left > 0; ++s, --left)
            c += aggressor == Side::Buy ? 2 * o.price - mid_half : mid_half - 2 * o.price;
        if (left == 0) break;
    }
    if (left > 0) return std::nullopt;
    return c;
}

long double vwap(std::span<const Trade> trades) {
    long double num = 0, den = 0;
    for (const auto& t : trades) {
        num += static_cast<long double>(t.price) * static_cast<long double>(t.size);
        den += static_cast<long double>(t.size);
    }
    return num / den;
}

OlsOracle ols_normal_equations(std::span<const std::vector<double>> columns, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = columns.size() + 1;
    auto x = [&](std::size_t row, std::size_t j) -> long double {
        return j == 0 ? 1.0L : static_cast<long double>(columns[j - 1][row]);
    };
    // augmented [X'X | I | X'y]
    std::vector<std::vector<long double>> a(p, std::vector<long double>(2 * p + 1, 0.0L));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t r = 0; r < n; ++r) a[i][j] += x(r, i) * x(r, j);
        a[i][p + i] = 1.0L;
        for (std::size_t r = 0; r < n; ++r) a[i][2 * p] += x(r, i) * static_cast<long double>(y[r]);
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) < 1e-300L) throw std::runtime_error("oracle: singular normal equations");
        std::swap(a[c], a[piv]);
        const long double d = a[c][c];
        for (auto& v : a[c]) v /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            if (f == 0.0L) continue;
            for (std::size_t k = 0; k < a[r].size(); ++k) a[r][k] -= f * a[c][k];
        }
    }
    OlsOracle out;
    long double ss_res = 0, ss_tot = 0, mean = 0;
    for (std::size_t r = 0; r < n; ++r) mean += static_cast<long double>(y[r]);
    mean /= static_cast<long double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        long double fit = 0;
        for (std::size_t j = 0; j < p; ++j) fit += a[j][2 * p] * x(r, j);
        const long double e = static_cast<long double>(y[r]) - fit;
        ss_res += e * e;
        const long double d = static_cast<long double>(y[r]) - mean;
        ss_tot += d * d;
    }
    const long double s2 = ss_res / static_cast<long double>(n - p);
    for (std::size_t j = 0; j < p; ++j) {
        out.beta.push_back(static_cast<double>(a[j][2 * p]));
        out.se.push_back(static_cast<double>(std::sqrt(s2 * a[j][p + j])));
    }
    out.r_square = static_cast<double>(1.0L - ss_res / ss_tot);
    return out;
}

}  // namespace oracle
