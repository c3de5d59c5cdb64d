#include "impactlab/ingest.hpp"

#include <algorithm>
#include <iterator>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <utility>

#include "impactlab/csv.hpp"
#include "impactlab/errors.hpp"

namespace impactlab {

namespace {

std::optional<OrderEvent> parse_event_row(std::string_view line, std::string& why) {
    const auto f = csv::split(line);
    if (f.size() != 10) {
        why = "expected 10 fields, got " + std::to_string(f.size());
        return std::nullopt;
    }
    OrderEvent e;
    if (f[0].empty()) {
        why = "empty stock_code";
        return std::nullopt;
    }
    e.stock_code = std::string(f[0]);

    auto seq = csv::parse_uint(f[1]);
    auto ts = csv::parse_int(f[2]);
    auto oid = csv::parse_uint(f[3]);
    if (!seq) { why = "bad seq"; return std::nullopt; }
    if (!ts || *ts < 0) { why = "bad timestamp_ms"; return std::nullopt; }
    if (!oid) { why = "bad order_id"; return std::nullopt; }
    e.seq = *seq;
    e.timestamp_ms = *ts;
    e.order_id = *oid;
    e.trader_id = std::string(f[4]);

    if (f[5] == "I") e.trader_type = TraderType::Institution;
    else if (f[5] == "P") e.trader_type = TraderType::Individual;
    else { why = "bad trader_type '" + std::string(f[5]) + "'"; return std::nullopt; }

    if (f[6] == "B") e.side = Side::Buy;
    else if (f[6] == "S") e.side = Side::Sell;
    else { why = "bad side '" + std::string(f[6]) + "'"; return std::nullopt; }

    if (f[7] == "SUBMIT") e.action = Action::Submit;
    else if (f[7] == "CANCEL") e.action = Action::Cancel;
    else { why = "bad action '" + std::string(f[7]) + "'"; return std::nullopt; }

    if (e.action == Action::Submit) {
        auto price = csv::parse_int(f[8]);
        auto size = csv::parse_int(f[9]);
        if (!price || *price <= 0) { why = "submit needs price_ticks > 0"; return std::nullopt; }
        if (!size || *size <= 0) { why = "submit needs size > 0"; return std::nullopt; }
        e.price = *price;
        e.size = *size;
    } else {
        for (std::string_view v : {f[8], f[9]}) {
            if (!v.empty() && v != "0") {
                why = "cancel must carry empty price_ticks and size";
                return std::nullopt;
            }
        }
    }
    return e;
}

std::string_view action_kind_name(CorporateActionKind k) {
    switch (k) {
        case CorporateActionKind::CashDividend: return "CASH";
        case CorporateActionKind::BonusShare: return "BONUS";
        case CorporateActionKind::RightsIssue: return "RIGHTS";
    }
    return "";
}

}  // namespace

ParsedEvents parse_order_events(std::istream& in) {
    if (!in) throw DataError("order events: unreadable source");
    std::string line;
    if (!csv::read_line(in, line)) throw DataError("order events: missing header");
    if (line != kOrderEventHeader) throw DataError("order events: header mismatch: '" + line + "'");

    ParsedEvents out;
    std::optional<std::uint64_t> last_seq;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string why;
        auto ev = parse_event_row(line, why);
        if (!ev) {
            ++out.rejected;
            out.diagnostics.push_back({lineno, why});
            continue;
        }
        if (last_seq && ev->seq <= *last_seq)
            throw DataError("order events: line " + std::to_string(lineno) + ": seq " +
                            std::to_string(ev->seq) + " does not increase (file corrupt)");
        last_seq = ev->seq;
        ++out.accepted;
        out.events.push_back(std::move(*ev));
    }
    if (in.bad()) throw DataError("order events: read failure");
    std::stable_sort(out.events.begin(), out.events.end(), [](const OrderEvent& a, const OrderEvent& b) {
        return std::pair(a.timestamp_ms, a.seq) < std::pair(b.timestamp_ms, b.seq);
    });
    return out;
}

std::string format_order_event(const OrderEvent& e) {
    std::string s;
    s.reserve(64);
    s += e.stock_code;
    s += ',';
    s += std::to_string(e.seq);
    s += ',';
    s += std::to_string(e.timestamp_ms);
    s += ',';
    s += std::to_string(e.order_id);
    s += ',';
    s += e.trader_id;
    s += ',';
    s += trader_code(e.trader_type);
    s += ',';
    s += side_code(e.side);
    s += ',';
    if (e.action == Action::Submit) {
        s += "SUBMIT,";
        s += std::to_string(e.price);
        s += ',';
        s += std::to_string(e.size);
    } else {
        s += "CANCEL,,";
    }
    return s;
}

void write_order_events(std::ostream& out, std::span<const OrderEvent> events) {
    out << kOrderEventHeader << '\n';
    for (const auto& e : events) out << format_order_event(e) << '\n';
}

std::string_view finding_name(FindingKind k) {
    switch (k) {
        case FindingKind::DanglingCancel: return "dangling_cancel";
        case FindingKind::DuplicateOrderId: return "duplicate_order_id";
        case FindingKind::OutOfSession: return "out_of_session";
    }
    return "";
}

std::size_t ValidationReport::hard_count() const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [](const Finding& f) { return f.hard; }));
}

std::size_t ValidationReport::soft_count() const { return findings.size() - hard_count(); }

ValidationReport validate_stream(std::span<const OrderEvent> events) {
    ValidationReport report;
    // (stock, order_id) -> seq of first submit
    std::map<std::pair<std::string, OrderId>, std::uint64_t> first_submit;
    std::set<std::pair<std::string, OrderId>> live;
    for (const auto& e : events) {
        if (!in_session(e.timestamp_ms)) {
            report.findings.push_back({FindingKind::OutOfSession, false, e.stock_code, e.order_id, e.seq, 0});
            continue;
        }
        auto key = std::pair(e.stock_code, e.order_id);
        if (e.action == Action::Submit) {
            auto [it, inserted] = first_submit.emplace(key, e.seq);
            if (!inserted) {
                report.findings.push_back(
                    {FindingKind::DuplicateOrderId, true, e.stock_code, e.order_id, e.seq, it->second});
                continue;
            }
            live.insert(key);
        } else if (live.erase(key) == 0) {
            report.findings.push_back({FindingKind::DanglingCancel, true, e.stock_code, e.order_id, e.seq, 0});
        }
    }
    return report;
}

std::vector<OrderEvent> session_events(std::span<const OrderEvent> events) {
    std::vector<OrderEvent> out;
    out.reserve(events.size());
    std::copy_if(events.begin(), events.end(), std::back_inserter(out),
                 [](const OrderEvent& e) { return in_session(e.timestamp_ms); });
    return out;
}

std::map<std::string, std::vector<OrderEvent>> group_by_stock(std::span<const OrderEvent> events) {
    std::map<std::string, std::vector<OrderEvent>> out;
    for (const auto& e : events) out[e.stock_code].push_back(e);
    return out;
}

CorporateAction CorporateAction::cash(std::string stock, Date ex, double per_share) {
    CorporateAction a{std::move(stock), ex, CorporateActionKind::CashDividend};
    a.cash_per_share = per_share;
    return a;
}

CorporateAction CorporateAction::bonus(std::string stock, Date ex, double ratio) {
    CorporateAction a{std::move(stock), ex, CorporateActionKind::BonusShare};
    a.bonus_ratio = ratio;
    return a;
}

CorporateAction CorporateAction::rights(std::string stock, Date ex, double ratio, double price) {
    CorporateAction a{std::move(stock), ex, CorporateActionKind::RightsIssue};
    a.rights_ratio = ratio;
    a.rights_price = price;
    return a;
}

std::vector<CorporateAction> parse_corporate_actions(std::istream& in) {
    if (!in) throw DataError("corporate actions: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != kCorporateActionHeader)
        throw DataError("corporate actions: header mismatch");

    std::vector<CorporateAction> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw DataError("corporate actions: line " + std::to_string(lineno) + ": " + msg);
        };
        const auto f = csv::split(line);
        if (f.size() != 7) fail("expected 7 fields");
        auto date = parse_date(f[1]);
        if (!date) fail("bad ex_date '" + std::string(f[1]) + "'");

        // Returns the parsed amount when the field must be set, else requires it empty.
        auto amount = [&](std::size_t idx, bool wanted) -> double {
            if (!wanted) {
                if (!f[idx].empty()) fail("field " + std::to_string(idx + 1) + " must be empty for this kind");
                return 0.0;
            }
            auto v = csv::parse_double(f[idx]);
            if (!v) fail("missing or malformed amount in field " + std::to_string(idx + 1));
            if (!(*v > 0.0)) fail("amounts must be strictly positive");
            return *v;
        };

        CorporateAction a;
        a.stock_code = std::string(f[0]);
        a.ex_date = *date;
        if (f[2] == "CASH") {
            a.kind = CorporateActionKind::CashDividend;
        } else if (f[2] == "BONUS") {
            a.kind = CorporateActionKind::BonusShare;
        } else if (f[2] == "RIGHTS") {
            a.kind = CorporateActionKind::RightsIssue;
        } else {
            fail("unknown kind '" + std::string(f[2]) + "'");
        }
        a.cash_per_share = amount(3, a.kind == CorporateActionKind::CashDividend);
        a.bonus_ratio = amount(4, a.kind == CorporateActionKind::BonusShare);
        a.rights_ratio = amount(5, a.kind == CorporateActionKind::RightsIssue);
        a.rights_price = amount(6, a.kind == CorporateActionKind::RightsIssue);
        out.push_back(std::move(a));
    }
    return out;
}

void write_corporate_actions(std::ostream& out, std::span<const CorporateAction> actions) {
    out << kCorporateActionHeader << '\n';
    auto opt = [](bool set, double v) { return set ? csv::fmt(v) : std::string{}; };
    for (const auto& a : actions) {
        out << a.stock_code << ',' << a.ex_date.iso() << ',' << action_kind_name(a.kind) << ','
            << opt(a.kind == CorporateActionKind::CashDividend, a.cash_per_share) << ','
            << opt(a.kind == CorporateActionKind::BonusShare, a.bonus_ratio) << ','
            << opt(a.kind == CorporateActionKind::RightsIssue, a.rights_ratio) << ','
            << opt(a.kind == CorporateActionKind::RightsIssue, a.rights_price) << '\n';
    }
}

std::vector<StockSummary> parse_stock_summaries(std::istream& in) {
    if (!in) throw DataError("stock summaries: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != kStockSummaryHeader)
        throw DataError("stock summaries: header mismatch");
    std::vector<StockSummary> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        const auto bad = [&] { return DataError("stock summaries: line " + std::to_string(lineno) + ": malformed row"); };
        if (f.size() != 4) throw bad();
        const auto cap = csv::parse_double(f[1]);
        const auto n = csv::parse_uint(f[2]);
        const auto total = csv::parse_int(f[3]);
        if (!cap || !n || !total) throw bad();
        if (*cap < 0.0 || *total < 0) throw bad();
        out.push_back({std::string(f[0]), *cap, static_cast<std::size_t>(*n), *total});
    }
    return out;
}

void write_stock_summaries(std::ostream& out, std::span<const StockSummary> rows) {
    out << kStockSummaryHeader << '\n';
    for (const auto& r : rows)
        out << r.stock_code << ',' << csv::fmt(r.float_cap) << ',' << r.n_orders << ',' << r.total_size << '\n';
}

std::vector<StockSummary> summarize_institutional_orders(std::span<const OrderEvent> events) {
    std::map<std::string, StockSummary> by_stock;
    for (const auto& e : events) {
        auto& s = by_stock[e.stock_code];
        s.stock_code = e.stock_code;
        if (e.action == Action::Submit && e.trader_type == TraderType::Institution) {
            ++s.n_orders;
            s.total_size += e.size;
        }
    }
    std::vector<StockSummary> out;
    for (auto& [_, s] : by_stock) out.push_back(std::move(s));
    return out;
}

}  // namespace impactlab
