#pragma once

// Order-flow and reference-table ingestion.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactlab/date.hpp"
#include "impactlab/types.hpp"

namespace impactlab {

inline constexpr std::string_view kOrderEventHeader =
    "stock_code,seq,timestamp_ms,order_id,trader_id,trader_type,side,action,price_ticks,size";
inline constexpr std::string_view kCorporateActionHeader =
    "stock_code,ex_date,kind,cash_per_share,bonus_ratio,rights_ratio,rights_price";
inline constexpr std::string_view kStockSummaryHeader = "stock_code,float_cap,n_orders,total_size";

struct RowDiagnostic {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string message;
};

struct ParsedEvents {
    std::vector<OrderEvent> events;  // (timestamp, seq) order
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<RowDiagnostic> diagnostics;
};

/// Parses the order-event CSV. Malformed rows are rejected and reported;
/// a bad header, unreadable stream or non-increasing seq throws DataError.
/// Cancel rows carry empty (or zero) price and size.
ParsedEvents parse_order_events(std::istream& in);

/// Canonical row form (no trailing newline). Cancels are written with empty price/size.
std::string format_order_event(const OrderEvent& e);
void write_order_events(std::ostream& out, std::span<const OrderEvent> events);

enum class FindingKind { DanglingCancel, DuplicateOrderId, OutOfSession };

std::string_view finding_name(FindingKind k);

struct Finding {
    FindingKind kind;
    bool hard = true;
    std::string stock_code;
    OrderId order_id = 0;
    std::uint64_t seq = 0;
    std::uint64_t other_seq = 0;  // first submit's seq for duplicates
};

struct ValidationReport {
    std::vector<Finding> findings;

    std::size_t hard_count() const;
    std::size_t soft_count() const;
    bool accepted() const { return hard_count() == 0; }
};

/// Report-only checks over an ordered stream. Out-of-session events are soft
/// findings and take no part in order-liveness tracking.
ValidationReport validate_stream(std::span<const OrderEvent> events);

/// Drops events outside the continuous-auction sessions.
std::vector<OrderEvent> session_events(std::span<const OrderEvent> events);

/// Splits a multi-stock stream into per-stock streams keyed by stock code, order preserved.
std::map<std::string, std::vector<OrderEvent>> group_by_stock(std::span<const OrderEvent> events);

enum class CorporateActionKind { CashDividend, BonusShare, RightsIssue };

struct CorporateAction {
    std::string stock_code;
    Date ex_date;
    CorporateActionKind kind = CorporateActionKind::CashDividend;
    double cash_per_share = 0.0;  // CashDividend
    double bonus_ratio = 0.0;     // BonusShare: new shares per held share
    double rights_ratio = 0.0;    // RightsIssue: rights per held share
    double rights_price = 0.0;    // RightsIssue: CNY

    static CorporateAction cash(std::string stock, Date ex, double per_share);
    static CorporateAction bonus(std::string stock, Date ex, double ratio);
    static CorporateAction rights(std::string stock, Date ex, double ratio, double price);
};

/// Throws DataError (with line number) on unknown kinds, non-positive amounts
/// or fields set for the wrong kind.
std::vector<CorporateAction> parse_corporate_actions(std::istream& in);
void write_corporate_actions(std::ostream& out, std::span<const CorporateAction> actions);

struct StockSummary {
    std::string stock_code;
    double float_cap = 0.0;  // million CNY
    std::size_t n_orders = 0;
    Shares total_size = 0;
};

std::vector<StockSummary> parse_stock_summaries(std::istream& in);
void write_stock_summaries(std::ostream& out, std::span<const StockSummary> rows);

/// N_o and S_o from a stream: institutional submits and their total size.
/// float_cap is left for the caller.
std::vector<StockSummary> summarize_institutional_orders(std::span<const OrderEvent> events);

}  // namespace impactlab
