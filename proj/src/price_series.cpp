#include "impactlab/price_series.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>

#include "impactlab/csv.hpp"
#include "impactlab/errors.hpp"

namespace impactlab {

AdjustmentResult adjust_prices(std::span<const DailyClose> closes, std::span<const CorporateAction> actions,
                               std::string_view stock_code) {
    AdjustmentResult out;
    out.closes.assign(closes.begin(), closes.end());
    for (auto& c : out.closes) c.adjusted_close = c.raw_close;

    struct ExDate {
        double dividend = 0.0, bonus = 0.0, rights = 0.0, rights_cash = 0.0;
    };
    std::map<Date, ExDate> by_date;
    for (const auto& a : actions) {
        if (a.stock_code != stock_code) {
            out.warnings.push_back("ignoring action for stock " + a.stock_code);
            continue;
        }
        auto& e = by_date[a.ex_date];
        switch (a.kind) {
            case CorporateActionKind::CashDividend: e.dividend += a.cash_per_share; break;
            case CorporateActionKind::BonusShare: e.bonus += a.bonus_ratio; break;
            case CorporateActionKind::RightsIssue:
                e.rights += a.rights_ratio;
                e.rights_cash += a.rights_ratio * a.rights_price;
                break;
        }
    }

    for (const auto& [ex_date, e] : by_date) {
        // Cum-close: last close strictly before the ex-date.
        auto first_ex = std::lower_bound(out.closes.begin(), out.closes.end(), ex_date,
                                         [](const DailyClose& c, const Date& d) { return c.date < d; });
        if (first_ex == out.closes.begin()) {
            out.warnings.push_back("no close before ex-date " + ex_date.iso() + "; action has no effect");
            continue;
        }
        if (first_ex == out.closes.end())
            out.warnings.push_back("ex-date " + ex_date.iso() + " after last close");
        const double cum = std::prev(first_ex)->raw_close;
        const double ex_price = (cum - e.dividend + e.rights_cash) / (1.0 + e.bonus + e.rights);
        const double factor = ex_price / cum;
        if (!(factor > 0.0))
            throw DataError("adjustment factor " + csv::fmt(factor) + " not positive at ex-date " + ex_date.iso());
        for (auto it = out.closes.begin(); it != first_ex; ++it) it->adjusted_close *= factor;
    }
    return out;
}

std::string_view trend_name(TrendKind k) { return k == TrendKind::Drawup ? "drawup" : "drawdown"; }

void TrendParams::validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw UsageError("theta must lie in (0,1)");
    if (!(kappa > 0.0)) throw UsageError("kappa must be positive");
}

Segmentation segment_trends(std::span<const double> closes, std::span<const Date> dates, const TrendParams& params) {
    params.validate();
    const std::size_t n = closes.size();
    if (n < 2) throw NumericalError("segment_trends: need at least 2 closes");
    if (!dates.empty() && dates.size() != n) throw std::invalid_argument("segment_trends: dates/closes mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(closes[i] > 0.0)) throw DataError("segment_trends: non-positive close");
        x[i] = std::log(closes[i]);
    }
    auto date_at = [&](std::size_t i) { return dates.empty() ? Date{} : dates[i]; };

    Segmentation out;
    auto emit = [&](TrendKind kind, std::size_t anchor, std::size_t extremum, std::size_t last_day) {
        TrendSegment s;
        s.kind = kind;
        s.first_day = anchor + 1;
        s.last_day = last_day;
        s.n_days = last_day - anchor;
        s.start_date = date_at(s.first_day);
        s.end_date = date_at(last_day);
        s.magnitude = x[extremum] - x[anchor];
        s.daily_mean = std::fabs(s.magnitude) / static_cast<double>(s.n_days);
        out.segments.push_back(s);
    };

    std::size_t first_move = 1;
    while (first_move < n && x[first_move] == x[first_move - 1]) ++first_move;
    if (first_move == n) {
        out.degenerate = true;
        emit(TrendKind::Drawup, 0, 0, n - 1);
        return out;
    }

    double dir = x[first_move] > x[first_move - 1] ? 1.0 : -1.0;
    std::size_t anchor = 0;
    std::size_t extremum = first_move;
    for (std::size_t t = first_move + 1; t < n; ++t) {
        const double excursion = dir * (x[t] - x[extremum]);
        if (excursion >= 0.0) {
            if (excursion > 0.0) extremum = t;
            continue;
        }
        const double counter = -excursion;
        const double magnitude = std::fabs(x[extremum] - x[anchor]);
        const double daily_mean = magnitude / static_cast<double>(extremum - anchor);
        if (counter >= params.theta * magnitude && counter >= params.kappa * daily_mean) {
            emit(dir > 0 ? TrendKind::Drawup : TrendKind::Drawdown, anchor, extremum, extremum);
            anchor = extremum;
            extremum = t;
            dir = -dir;
        }
    }
    emit(dir > 0 ? TrendKind::Drawup : TrendKind::Drawdown, anchor, extremum, n - 1);
    return out;
}

Segmentation segment_trends(std::span<const DailyClose> closes, const TrendParams& params) {
    std::vector<double> px;
    std::vector<Date> dates;
    for (const auto& c : closes) {
        px.push_back(c.adjusted_close);
        dates.push_back(c.date);
    }
    return segment_trends(px, dates, params);
}

double drawup_ratio(std::span<const TrendSegment> segments) {
    if (segments.empty()) throw NumericalError("drawup_ratio: no segments");
    std::size_t up = 0, total = 0;
    for (const auto& s : segments) {
        total += s.n_days;
        if (s.kind == TrendKind::Drawup) up += s.n_days;
    }
    if (total == 0) throw NumericalError("drawup_ratio: zero trading days");
    return static_cast<double>(up) / static_cast<double>(total);
}

TrendGroup trend_group(double r) {
    if (r >= 0.55) return TrendGroup::Rising;
    if (r <= 0.45) return TrendGroup::Falling;
    return TrendGroup::Middle;
}

std::string_view trend_group_name(TrendGroup g) {
    switch (g) {
        case TrendGroup::Rising: return "r>=0.55";
        case TrendGroup::Falling: return "r<=0.45";
        case TrendGroup::Middle: return "0.45<r<0.55";
    }
    return "";
}

std::optional<TrendKind> trend_on(std::span<const TrendSegment> segments, Date date) {
    for (const auto& s : segments)
        if (date >= s.start_date && date <= s.end_date) return s.kind;
    return std::nullopt;
}

std::map<std::string, std::vector<DailyClose>> parse_daily_closes(std::istream& in) {
    if (!in) throw DataError("daily closes: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != kDailyCloseHeader) throw DataError("daily closes: header mismatch");
    std::map<std::string, std::vector<DailyClose>> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        auto date = f.size() == 3 ? parse_date(f[1]) : std::nullopt;
        auto px = f.size() == 3 ? csv::parse_double(f[2]) : std::nullopt;
        if (!date || !px || !(*px > 0.0))
            throw DataError("daily closes: line " + std::to_string(lineno) + ": malformed row");
        auto& series = out[std::string(f[0])];
        if (!series.empty() && !(series.back().date < *date))
            throw DataError("daily closes: line " + std::to_string(lineno) + ": dates not increasing");
        series.push_back({*date, *px, *px});
    }
    return out;
}

std::vector<StockSegment> parse_segments(std::istream& in) {
    if (!in) throw DataError("segments: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != kSegmentHeader) throw DataError("segments: header mismatch");
    std::vector<StockSegment> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        bool ok = f.size() == 6 && (f[1] == "drawup" || f[1] == "drawdown");
        auto start = ok ? parse_date(f[2]) : std::nullopt;
        auto end = ok ? parse_date(f[3]) : std::nullopt;
        auto days = ok ? csv::parse_uint(f[4]) : std::nullopt;
        auto mag = ok ? csv::parse_double(f[5]) : std::nullopt;
        if (!start || !end || !days || !mag)
            throw DataError("segments: line " + std::to_string(lineno) + ": malformed row");
        StockSegment s;
        s.stock_code = std::string(f[0]);
        s.segment.kind = f[1] == "drawup" ? TrendKind::Drawup : TrendKind::Drawdown;
        s.segment.start_date = *start;
        s.segment.end_date = *end;
        s.segment.n_days = *days;
        s.segment.magnitude = *mag;
        s.segment.daily_mean = *days ? std::fabs(*mag) / static_cast<double>(*days) : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace impactlab
