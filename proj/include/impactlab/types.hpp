#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace impactlab {

using Ticks = std::int64_t;   // 1 tick = tick_size CNY (0.01 by default)
using Shares = std::int64_t;
using OrderId = std::uint64_t;
using Millis = std::int64_t;  // milliseconds since midnight of the trading day

enum class Side : std::uint8_t { Buy, Sell };
enum class TraderType : std::uint8_t { Institution, Individual };
enum class Action : std::uint8_t { Submit, Cancel };

constexpr Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

constexpr char side_code(Side s) { return s == Side::Buy ? 'B' : 'S'; }
constexpr char trader_code(TraderType t) { return t == TraderType::Institution ? 'I' : 'P'; }
constexpr std::string_view side_name(Side s) { return s == Side::Buy ? "buy" : "sell"; }

struct OrderEvent {
    std::string stock_code;
    std::uint64_t seq = 0;
    Millis timestamp_ms = 0;
    OrderId order_id = 0;
    std::string trader_id;
    TraderType trader_type = TraderType::Individual;
    Side side = Side::Buy;
    Action action = Action::Submit;
    Ticks price = 0;   // zero for cancels
    Shares size = 0;   // zero for cancels

    bool operator==(const OrderEvent&) const = default;
};

inline constexpr double kDefaultTickSizeCny = 0.01;
inline constexpr Shares kDefaultLotSize = 100;

constexpr Millis hms_ms(int h, int m, int s = 0) {
    return (static_cast<Millis>(h) * 3600 + m * 60 + s) * 1000;
}

// Continuous-auction sessions, [start, end] inclusive.
struct Session {
    Millis start_ms;
    Millis end_ms;
};

inline constexpr Session kMorningSession{hms_ms(9, 30), hms_ms(11, 30)};
inline constexpr Session kAfternoonSession{hms_ms(13, 0), hms_ms(15, 0)};

constexpr std::optional<Session> session_of(Millis ts) {
    for (Session s : {kMorningSession, kAfternoonSession})
        if (ts >= s.start_ms && ts <= s.end_ms) return s;
    return std::nullopt;
}

constexpr bool in_session(Millis ts) { return session_of(ts).has_value(); }

}  // namespace impactlab
