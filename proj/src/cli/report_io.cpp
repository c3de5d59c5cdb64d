#include "impactlab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "impactlab/csv.hpp"
#include "impactlab/errors.hpp"

namespace impactlab::report {

namespace {

std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

/// RFC 4180 quoting for cells holding separators (bin labels such as "[-5,0)").
std::string quoted(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string q = "\"";
    for (char c : cell) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::vector<std::string> q;
    q.reserve(cells.size());
    for (const auto& c : cells) q.push_back(quoted(c));
    return join(q);
}

std::string str(std::string_view v) { return std::string(v); }

std::string fmt_t(const std::optional<stats::TTestResult>& t) { return t ? csv::fmt(t->t) : ""; }
std::string fmt_signif(const std::optional<stats::TTestResult>& t) { return t ? str(stats::stars(t->signif)) : ""; }

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    out << csv_row(table.header) << '\n';
    for (const auto& row : table.rows) out << csv_row(row) << '\n';
}

void write_text(std::ostream& out, const Table& table, std::string_view title, std::string_view manifest_hash) {
    std::vector<std::size_t> width(table.header.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
    };
    widen(table.header);
    for (const auto& row : table.rows) widen(row);

    out << "# " << title << " manifest=" << manifest_hash << '\n';
    auto line = [&](const std::vector<std::string>& row) {
        std::string s;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += "  ";
            s += row[i];
            if (i + 1 < row.size()) s.append(width[i] - row[i].size(), ' ');
        }
        out << s << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Table tape_table(std::span<const Trade> tape) {
    Table t{{"seq", "timestamp_ms", "price_ticks", "size", "aggressor_side", "aggressor_order_id", "resting_order_id",
             "aggressor_trader_type"},
            {}};
    for (const auto& tr : tape)
        t.rows.push_back({std::to_string(tr.seq), std::to_string(tr.timestamp_ms), std::to_string(tr.price),
                          std::to_string(tr.size), std::string(1, side_code(tr.aggressor_side)),
                          std::to_string(tr.aggressor_order_id), std::to_string(tr.resting_order_id),
                          std::string(1, trader_code(tr.aggressor_trader_type))});
    return t;
}

TransactionRow to_row(const InstitutionalTransaction& tx, double tick_size_cny) {
    TransactionRow r;
    r.stock = tx.stock_code;
    r.order_id = tx.order_id;
    r.side = tx.side;
    r.volume = tx.volume;
    r.pi = tx.pi;
    if (tx.c_before) r.c = tx.c_before->c_cny(tick_size_cny);
    r.prior_volatility = tx.prior_volatility;
    r.full_filled = tx.full_filled;
    r.trend = tx.trend;
    r.anchor_ms = tx.anchor_ms;
    return r;
}

Table transaction_table(std::span<const TransactionRow> rows) {
    Table t;
    for (auto f : csv::split(kTransactionHeader)) t.header.emplace_back(f);
    for (const auto& r : rows)
        t.rows.push_back({r.stock, std::to_string(r.order_id), std::string(1, side_code(r.side)),
                          std::to_string(r.volume), csv::fmt(r.pi), csv::fmt(r.c), csv::fmt(r.prior_volatility),
                          r.full_filled ? "1" : "0", r.trend ? str(trend_name(*r.trend)) : "",
                          std::to_string(r.anchor_ms)});
    return t;
}

std::vector<TransactionRow> parse_transactions(std::istream& in) {
    if (!in) throw DataError("transactions: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != kTransactionHeader) throw DataError("transactions: header mismatch");
    std::vector<TransactionRow> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto bad = [&](const char* what) {
            return DataError("transactions: line " + std::to_string(lineno) + ": " + what);
        };
        const auto f = csv::split(line);
        if (f.size() != 10) throw bad("expected 10 fields");
        TransactionRow r;
        r.stock = std::string(f[0]);
        auto id = csv::parse_uint(f[1]);
        auto v = csv::parse_int(f[3]);
        auto pi = csv::parse_double(f[4]);
        auto anchor = csv::parse_int(f[9]);
        if (r.stock.empty() || !id || !v || *v <= 0 || !pi || !anchor) throw bad("malformed field");
        if (f[2] != "B" && f[2] != "S") throw bad("side must be B or S");
        if (f[7] != "0" && f[7] != "1") throw bad("full_filled must be 0 or 1");
        r.order_id = *id;
        r.side = f[2] == "B" ? Side::Buy : Side::Sell;
        r.volume = *v;
        r.pi = *pi;
        if (!f[5].empty()) {
            r.c = csv::parse_double(f[5]);
            if (!r.c) throw bad("bad C");
        }
        if (!f[6].empty()) {
            r.prior_volatility = csv::parse_double(f[6]);
            if (!r.prior_volatility) throw bad("bad V_p");
        }
        r.full_filled = f[7] == "1";
        if (f[8] == "drawup")
            r.trend = TrendKind::Drawup;
        else if (f[8] == "drawdown")
            r.trend = TrendKind::Drawdown;
        else if (!f[8].empty())
            throw bad("unknown trend");
        r.anchor_ms = *anchor;
        out.push_back(std::move(r));
    }
    return out;
}

Table exclusion_table(std::span<const StockReplay> replays) {
    Table t{{"stock", "transactions", "rejected_events", "no_reference", "no_C", "no_V_p", "resting_at_close"}, {}};
    for (const auto& r : replays)
        t.rows.push_back({r.stock_code, std::to_string(r.transactions.size()),
                          std::to_string(r.exclusions.rejected_events), std::to_string(r.exclusions.no_reference),
                          std::to_string(r.exclusions.no_c), std::to_string(r.exclusions.no_prior_volatility),
                          std::to_string(r.resting_at_close)});
    return t;
}

Table validation_table(const ValidationReport& report) {
    Table t{{"finding", "severity", "stock", "order_id", "seq", "other_seq"}, {}};
    for (const auto& f : report.findings)
        t.rows.push_back({str(finding_name(f.kind)), f.hard ? "hard" : "soft", f.stock_code, std::to_string(f.order_id),
                          std::to_string(f.seq), f.other_seq ? std::to_string(f.other_seq) : ""});
    return t;
}

Table segment_table(std::span<const StockSegment> segments) {
    Table t;
    for (auto f : csv::split(kSegmentHeader)) t.header.emplace_back(f);
    for (const auto& s : segments)
        t.rows.push_back({s.stock_code, str(trend_name(s.segment.kind)), s.segment.start_date.iso(),
                          s.segment.end_date.iso(), std::to_string(s.segment.n_days), csv::fmt(s.segment.magnitude)});
    return t;
}

Table ratio_table(std::span<const StockRatio> ratios) {
    Table t{{"stock_code", "r", "group"}, {}};
    for (const auto& r : ratios) t.rows.push_back({r.stock_code, csv::fmt(r.r), str(trend_group_name(r.group))});
    return t;
}

std::vector<StockRatio> parse_ratios(std::istream& in) {
    if (!in) throw DataError("ratios: unreadable source");
    std::string line;
    if (!csv::read_line(in, line) || line != "stock_code,r,group") throw DataError("ratios: header mismatch");
    std::vector<StockRatio> out;
    std::size_t lineno = 1;
    while (csv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        auto r = f.size() == 3 ? csv::parse_double(f[1]) : std::nullopt;
        if (!r || *r < 0.0 || *r > 1.0) throw DataError("ratios: line " + std::to_string(lineno) + ": malformed row");
        out.push_back({std::string(f[0]), *r, trend_group(*r)});
    }
    return out;
}

Table trend_plot_table(std::span<const PlotPoint> points) {
    Table t{{"stock_code", "date", "adjusted_close", "kind"}, {}};
    for (const auto& p : points)
        t.rows.push_back({p.stock_code, p.date.iso(), csv::fmt(p.adjusted_close), p.kind ? str(trend_name(*p.kind)) : ""});
    return t;
}

Table asymmetry_table(std::span<const GroupedAsymmetry> rows) {
    Table t{{"group", "stock", "trend", "mean_PI_buy", "n_buy", "mean_PI_sell", "n_sell", "t_stat", "signif"}, {}};
    for (const auto& g : rows) {
        const auto& r = g.row;
        t.rows.push_back({g.group, r.stock_code, str(trend_name(r.trend)), r.n_buy ? csv::fmt(r.mean_pi_buy) : "",
                          std::to_string(r.n_buy), r.n_sell ? csv::fmt(r.mean_pi_sell) : "", std::to_string(r.n_sell),
                          fmt_t(r.t), fmt_signif(r.t)});
    }
    return t;
}

Table event_study_table(std::span<const EventStudyTable> tables) {
    Table t{{"subset", "bin", "side", "mean_R", "mean_C", "count", "t_stat", "signif"}, {}};
    for (const auto& tab : tables)
        for (const auto& bin : tab.bins)
            for (Side side : {Side::Buy, Side::Sell}) {
                const BinSide& b = side == Side::Buy ? bin.purchase : bin.sale;
                t.rows.push_back({str(subset_name(tab.subset)), bin.label, side == Side::Buy ? "purchase" : "sale",
                                  b.count ? csv::fmt(b.mean_r) : "", b.c_count ? csv::fmt(b.mean_c) : "",
                                  std::to_string(b.count), fmt_t(bin.t), fmt_signif(bin.t)});
            }
    return t;
}

Table anova_table(std::span<const EventStudyTable> tables) {
    Table t{{"subset", "side", "F", "df_between", "df_within", "signif", "anchors", "truncated"}, {}};
    for (const auto& tab : tables)
        for (Side side : {Side::Buy, Side::Sell}) {
            const auto& a = side == Side::Buy ? tab.anova_purchase : tab.anova_sale;
            const auto anchors = side == Side::Buy ? tab.anchors_purchase : tab.anchors_sale;
            t.rows.push_back({str(subset_name(tab.subset)), side == Side::Buy ? "purchase" : "sale",
                              a ? csv::fmt(a->f) : "", a ? std::to_string(a->df_between) : "",
                              a ? std::to_string(a->df_within) : "", a ? str(stats::stars(a->signif)) : "",
                              std::to_string(anchors), std::to_string(tab.truncated)});
        }
    return t;
}

Table event_plot_table(std::span<const EventStudyTable> tables, const EventWindow& window) {
    Table t{{"subset", "side", "t_s", "mean_R", "mean_C"}, {}};
    const std::size_t zero = window.zero_bin();
    for (const auto& tab : tables)
        for (Side side : {Side::Buy, Side::Sell})
            for (std::size_t b = 0; b < tab.bins.size(); ++b) {
                const BinSide& s = side == Side::Buy ? tab.bins[b].purchase : tab.bins[b].sale;
                double mid_ms = 0.0;
                if (b < zero)
                    mid_ms = -static_cast<double>(window.window_ms) + (static_cast<double>(b) + 0.5) * static_cast<double>(window.bin_ms);
                else if (b > zero)
                    mid_ms = (static_cast<double>(b - zero) - 0.5) * static_cast<double>(window.bin_ms);
                t.rows.push_back({str(subset_name(tab.subset)), side == Side::Buy ? "purchase" : "sale",
                                  csv::fmt(mid_ms / 1000.0), s.count ? csv::fmt(s.mean_r) : "",
                                  s.c_count ? csv::fmt(s.mean_c) : ""});
            }
    return t;
}

Table regression_table(std::span<const RegressionRun> runs) {
    Table t{{"subset", "model", "coef", "value", "t_stat", "signif"}, {}};
    for (const auto& run : runs) {
        const std::string model(model_name(run.model));
        for (const auto& c : run.result.coefficients)
            t.rows.push_back({run.subset, model, c.name, csv::fmt(c.value), csv::fmt(c.t), str(stats::stars(c.signif))});
        t.rows.push_back({run.subset, model, "r_square", csv::fmt(run.result.r_square), "", ""});
        t.rows.push_back({run.subset, model, "n", std::to_string(run.result.n_rows), "", ""});
    }
    return t;
}

}  // namespace impactlab::report
