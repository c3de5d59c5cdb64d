#pragma once

// Adjusted daily closes and drawup/drawdown segmentation.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactlab/date.hpp"
#include "impactlab/ingest.hpp"

namespace impactlab {

struct DailyClose {
    Date date;
    double raw_close = 0.0;
    double adjusted_close = 0.0;
};

struct AdjustmentResult {
    std::vector<DailyClose> closes;
    std::vector<std::string> warnings;
};

/// Backward adjustment for `stock_code`. For each ex-date with cum-close P and
/// combined dividend D, bonus ratio b, rights ratio k at price p:
///   f = ((P - D + k p) / (1 + b + k)) / P
/// multiplies every close strictly before the ex-date; factors compound.
/// Actions for other stocks are skipped with a warning. Throws DataError if a
/// factor is not positive.
AdjustmentResult adjust_prices(std::span<const DailyClose> closes, std::span<const CorporateAction> actions,
                               std::string_view stock_code);

enum class TrendKind { Drawup, Drawdown };

std::string_view trend_name(TrendKind k);

/// One trend. Days are daily price changes: day t is the move from close t-1
/// to close t, so a series of N closes has N-1 days. A segment covers days
/// [first_day, last_day] and its magnitude is the log change between the
/// extremum that opened it and the extremum that closed it.
struct TrendSegment {
    TrendKind kind = TrendKind::Drawup;
    Date start_date;  // date of the first close in the segment (first_day)
    Date end_date;    // date of the last close in the segment (last_day)
    std::size_t first_day = 0;  // index into closes, >= 1
    std::size_t last_day = 0;
    std::size_t n_days = 0;
    double magnitude = 0.0;
    double daily_mean = 0.0;  // |magnitude| / n_days
};

struct TrendParams {
    double theta = 0.30;  // counter-move fraction of the running trend
    double kappa = 3.0;   // multiple of the running trend's daily mean

    void validate() const;
};

struct Segmentation {
    std::vector<TrendSegment> segments;
    bool degenerate = false;  // constant series, one zero-magnitude segment
};

/// Greedy left-to-right scan in log price. A counter-move away from the
/// current trend's extremum interrupts the trend only when it reaches both
/// theta * |trend magnitude| and kappa * trend daily mean; the trend then ends
/// at its extremum and the opposite trend starts there.
Segmentation segment_trends(std::span<const double> closes, std::span<const Date> dates, const TrendParams& params);
Segmentation segment_trends(std::span<const DailyClose> closes, const TrendParams& params);

/// Fraction of days in drawups.
double drawup_ratio(std::span<const TrendSegment> segments);

enum class TrendGroup { Rising, Falling, Middle };  // r >= 0.55, r <= 0.45, otherwise

TrendGroup trend_group(double r);
std::string_view trend_group_name(TrendGroup g);

/// Kind of the segment holding `date`; nullopt when the date lies outside.
std::optional<TrendKind> trend_on(std::span<const TrendSegment> segments, Date date);

inline constexpr std::string_view kDailyCloseHeader = "stock_code,date,close_cny";
inline constexpr std::string_view kSegmentHeader = "stock_code,kind,start,end,n_days,magnitude";

/// Per-stock close series in date order.
std::map<std::string, std::vector<DailyClose>> parse_daily_closes(std::istream& in);

struct StockSegment {
    std::string stock_code;
    TrendSegment segment;
};

std::vector<StockSegment> parse_segments(std::istream& in);

}  // namespace impactlab
