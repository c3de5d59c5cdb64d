#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "impactlab/errors.hpp"
#include "impactlab/ingest.hpp"
#include "impactlab/synth.hpp"
#include "oracles.hpp"

using namespace impactlab;

namespace {

std::string with_header(const std::string& body) { return std::string(kOrderEventHeader) + "\n" + body; }

ParsedEvents parse(const std::string& text) {
    std::istringstream in(text);
    return parse_order_events(in);
}

std::string serialize(std::span<const OrderEvent> events) {
    std::ostringstream out;
    write_order_events(out, events);
    return out.str();
}

OrderEvent submit(std::uint64_t seq, OrderId id, Side side = Side::Buy, Millis ts = hms_ms(10, 0)) {
    OrderEvent e;
    e.stock_code = "000001";
    e.seq = seq;
    e.timestamp_ms = ts;
    e.order_id = id;
    e.trader_id = "x";
    e.side = side;
    e.price = 1000;
    e.size = 100;
    return e;
}

OrderEvent cancel(std::uint64_t seq, OrderId id, Millis ts = hms_ms(10, 0)) {
    OrderEvent e = submit(seq, id, Side::Buy, ts);
    e.action = Action::Cancel;
    e.price = 0;
    e.size = 0;
    return e;
}

}  // namespace

TEST(ParseOrderEvents, ExampleRowFieldByField) {
    // trader_id "T7" filled in; the schema has ten columns
    const auto p = parse(with_header("000001,1001,34200000,7,T7,I,B,SUBMIT,1050,500\n"));
    ASSERT_EQ(p.accepted, 1u);
    ASSERT_EQ(p.rejected, 0u);
    const auto& e = p.events.at(0);
    EXPECT_EQ(e.stock_code, "000001");
    EXPECT_EQ(e.seq, 1001u);
    EXPECT_EQ(e.timestamp_ms, hms_ms(9, 30));
    EXPECT_EQ(e.order_id, 7u);
    EXPECT_EQ(e.trader_id, "T7");
    EXPECT_EQ(e.trader_type, TraderType::Institution);
    EXPECT_EQ(e.side, Side::Buy);
    EXPECT_EQ(e.action, Action::Submit);
    EXPECT_EQ(e.price, 1050);
    EXPECT_DOUBLE_EQ(static_cast<double>(e.price) * kDefaultTickSizeCny, 10.50);
    EXPECT_EQ(e.size, 500);
}

TEST(ParseOrderEvents, EmptyFileWithHeader) {
    const auto p = parse(with_header(""));
    EXPECT_TRUE(p.events.empty());
    EXPECT_EQ(p.accepted, 0u);
    EXPECT_EQ(p.rejected, 0u);
}

TEST(ParseOrderEvents, ZeroSizeRejectedStreamContinues) {
    const auto p = parse(with_header("000001,1,34200000,1,a,P,B,SUBMIT,1000,0\n"
                                     "000001,2,34200001,2,a,P,S,SUBMIT,1001,100\n"));
    EXPECT_EQ(p.accepted, 1u);
    EXPECT_EQ(p.rejected, 1u);
    ASSERT_EQ(p.diagnostics.size(), 1u);
    EXPECT_EQ(p.diagnostics[0].line, 2u);
    EXPECT_EQ(p.events.at(0).seq, 2u);
}

TEST(ParseOrderEvents, MalformedRowsReportLineNumbers) {
    const auto p = parse(with_header("000001,1,34200000,1,a,P,B,SUBMIT,1000,100\n"
                                     "000001,2,34200000,2,a,X,B,SUBMIT,1000,100\n"
                                     "000001,3,34200000,3,a,P,B,SUBMIT,1000\n"
                                     "000001,4,34200000,1,a,P,B,CANCEL,1000,100\n"
                                     "000001,5,34200000,1,a,P,B,CANCEL,,\n"));
    EXPECT_EQ(p.accepted, 2u);
    EXPECT_EQ(p.rejected, 3u);
    std::vector<std::size_t> lines;
    for (const auto& d : p.diagnostics) lines.push_back(d.line);
    EXPECT_EQ(lines, (std::vector<std::size_t>{3, 4, 5}));
}

TEST(ParseOrderEvents, HardErrors) {
    EXPECT_THROW(parse("stock,seq\n"), DataError);
    EXPECT_THROW(parse(""), DataError);
    EXPECT_THROW(parse(with_header("000001,5,34200000,1,a,P,B,SUBMIT,1000,100\n"
                                   "000001,5,34200001,2,a,P,B,SUBMIT,1000,100\n")),
                 DataError);
    std::ifstream missing("/nonexistent/orders.csv");
    EXPECT_THROW(parse_order_events(missing), DataError);
}

TEST(ParseOrderEvents, OrderedByTimestampThenSeq) {
    const auto p = parse(with_header("000001,1,34200500,1,a,P,B,SUBMIT,1000,100\n"
                                     "000001,2,34200100,2,a,P,B,SUBMIT,1000,100\n"
                                     "000001,3,34200100,3,a,P,B,SUBMIT,1000,100\n"));
    ASSERT_EQ(p.events.size(), 3u);
    EXPECT_EQ(p.events[0].seq, 2u);
    EXPECT_EQ(p.events[1].seq, 3u);
    EXPECT_EQ(p.events[2].seq, 1u);
}

TEST(ParseOrderEvents, RoundTripIsByteIdentical) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        FlowConfig cfg;
        cfg.seed = seed;
        cfg.max_events = 3000;
        const auto events = gen_flow(cfg);
        const std::string text = serialize(events);
        const auto back = parse(text);
        EXPECT_EQ(back.rejected, 0u);
        EXPECT_EQ(back.events, events);
        EXPECT_EQ(serialize(back.events), text);
    }
}

TEST(ParseOrderEvents, RoundTripModuloRejectedRows) {
    FlowConfig cfg;
    cfg.max_events = 500;
    const auto events = gen_flow(cfg);
    const std::string text = serialize(events);
    // splice garbage rows between the valid ones
    std::istringstream in(text);
    std::string line, dirty;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        dirty += line + "\n";
        if (n++ % 50 == 7) dirty += "000001,oops,1,1,a,P,B,SUBMIT,1,1\n";
    }
    const auto back = parse(dirty);
    EXPECT_EQ(back.rejected, 10u);
    EXPECT_EQ(serialize(back.events), text);
}

TEST(ParseOrderEvents, CancelAcceptsZeroButWritesEmpty) {
    const auto p = parse(with_header("000001,1,34200000,1,a,P,B,SUBMIT,1000,100\n"
                                     "000001,2,34200001,1,a,P,B,CANCEL,0,0\n"));
    ASSERT_EQ(p.accepted, 2u);
    EXPECT_EQ(format_order_event(p.events[1]), "000001,2,34200001,1,a,P,B,CANCEL,,");
}

TEST(CorporateActions, ExampleRows) {
    std::istringstream in(std::string(kCorporateActionHeader) +
                          "\n000001,2003-09-29,CASH,0.15,,,\n"
                          "000002,2003-05-23,BONUS,,1,,\n"
                          "000024,2003-06-10,RIGHTS,,,0.3,8.93\n"
                          "000024,2003-06-10,CASH,0.05,,,\n");
    const auto a = parse_corporate_actions(in);
    ASSERT_EQ(a.size(), 4u);
    EXPECT_EQ(a[0].kind, CorporateActionKind::CashDividend);
    EXPECT_DOUBLE_EQ(a[0].cash_per_share, 0.15);
    EXPECT_EQ(a[0].ex_date, (Date{2003, 9, 29}));
    EXPECT_EQ(a[1].kind, CorporateActionKind::BonusShare);
    EXPECT_DOUBLE_EQ(a[1].bonus_ratio, 1.0);
    EXPECT_EQ(a[1].ex_date, (Date{2003, 5, 23}));
    EXPECT_EQ(a[2].kind, CorporateActionKind::RightsIssue);
    EXPECT_DOUBLE_EQ(a[2].rights_ratio, 0.3);
    EXPECT_DOUBLE_EQ(a[2].rights_price, 8.93);
    EXPECT_EQ(a[2].ex_date, a[3].ex_date);

    std::ostringstream out;
    write_corporate_actions(out, a);
    std::istringstream again(out.str());
    EXPECT_EQ(parse_corporate_actions(again).size(), 4u);
}

TEST(CorporateActions, Errors) {
    auto parse_one = [](const std::string& row) {
        std::istringstream in(std::string(kCorporateActionHeader) + "\n" + row + "\n");
        return parse_corporate_actions(in);
    };
    EXPECT_THROW(parse_one("000001,2003-09-29,SPLIT,0.15,,,"), DataError);
    EXPECT_THROW(parse_one("000001,2003-09-29,CASH,-0.15,,,"), DataError);
    EXPECT_THROW(parse_one("000001,2003-09-29,CASH,0.15,1,,"), DataError);
    EXPECT_THROW(parse_one("000001,2003-02-30,CASH,0.15,,,"), DataError);
    EXPECT_THROW(parse_one("000024,2003-06-10,RIGHTS,,,0.3,"), DataError);
}

TEST(StockSummaries, RoundTripAndCounts) {
    std::vector<OrderEvent> ev{submit(1, 1), submit(2, 2), cancel(3, 1)};
    ev[0].trader_type = TraderType::Institution;
    ev[1].trader_type = TraderType::Institution;
    ev[1].size = 300;
    auto rows = summarize_institutional_orders(ev);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n_orders, 2u);
    EXPECT_EQ(rows[0].total_size, 400);
    EXPECT_LE(rows[0].n_orders, ev.size());
    rows[0].float_cap = 1234.5;
    std::ostringstream out;
    write_stock_summaries(out, rows);
    std::istringstream in(out.str());
    const auto back = parse_stock_summaries(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_DOUBLE_EQ(back[0].float_cap, 1234.5);
    EXPECT_EQ(back[0].total_size, 400);
}

TEST(ValidateStream, DanglingCancel) {
    std::vector<OrderEvent> ev{cancel(1, 9), submit(2, 9)};
    const auto r = validate_stream(ev);
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].kind, FindingKind::DanglingCancel);
    EXPECT_FALSE(r.accepted());
}

TEST(ValidateStream, ValidThreeEvents) {
    std::vector<OrderEvent> ev{submit(1, 1), submit(2, 2, Side::Sell), cancel(3, 1)};
    const auto r = validate_stream(ev);
    EXPECT_TRUE(r.findings.empty());
    EXPECT_TRUE(r.accepted());
}

TEST(ValidateStream, DuplicateOrderIdCarriesBothSeqs) {
    std::vector<OrderEvent> ev{submit(4, 1), submit(5, 2), submit(9, 1)};
    const auto r = validate_stream(ev);
    // linear-scan oracle
    std::vector<std::pair<std::uint64_t, std::uint64_t>> expected;
    for (std::size_t i = 0; i < ev.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (ev[j].order_id == ev[i].order_id) {
                expected.emplace_back(ev[i].seq, ev[j].seq);
                break;
            }
    ASSERT_EQ(r.findings.size(), expected.size());
    EXPECT_EQ(r.findings[0].kind, FindingKind::DuplicateOrderId);
    EXPECT_EQ(r.findings[0].seq, expected[0].first);
    EXPECT_EQ(r.findings[0].other_seq, expected[0].second);
}

TEST(ValidateStream, OutOfSessionIsSoft) {
    std::vector<OrderEvent> ev{submit(1, 1, Side::Buy, hms_ms(9, 15)), submit(2, 2, Side::Buy, hms_ms(12, 0)),
                               submit(3, 3, Side::Buy, hms_ms(11, 30)), submit(4, 4, Side::Buy, hms_ms(15, 0, 1))};
    const auto r = validate_stream(ev);
    EXPECT_EQ(r.soft_count(), 3u);
    EXPECT_TRUE(r.accepted());
    EXPECT_EQ(session_events(ev).size(), 1u);
}

TEST(ValidateStream, EveryCancelResolvesToOneLiveSubmit) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        FlowConfig cfg;
        cfg.seed = seed;
        cfg.max_events = 5000;
        const auto ev = gen_flow(cfg);
        ASSERT_TRUE(validate_stream(ev).accepted());
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (ev[i].action != Action::Cancel) continue;
            std::size_t submits = 0, cancels = 0;
            for (std::size_t j = 0; j < i; ++j) {
                if (ev[j].order_id != ev[i].order_id) continue;
                (ev[j].action == Action::Submit ? submits : cancels)++;
            }
            EXPECT_EQ(submits, 1u);
            EXPECT_EQ(cancels, 0u);
        }
    }
}

TEST(GroupByStock, PreservesOrder) {
    auto a = submit(1, 1), b = submit(2, 1), c = submit(3, 2);
    b.stock_code = "000002";
    std::vector<OrderEvent> ev{a, b, c};
    const auto g = group_by_stock(ev);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.at("000001").size(), 2u);
    EXPECT_EQ(g.at("000001")[1].seq, 3u);
}
