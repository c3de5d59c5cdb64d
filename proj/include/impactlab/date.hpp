#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace impactlab {

/// Proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01.
    long days_since_epoch() const;
    static Date from_days(long days);
    /// 0 = Monday .. 6 = Sunday
    int weekday() const;
    std::string iso() const;
};

/// Parses YYYY-MM-DD; nullopt on malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);

/// Next Monday-to-Friday date after d.
Date next_weekday(Date d);

}  // namespace impactlab
