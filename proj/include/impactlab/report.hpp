#pragma once

// Report tables: CSV and aligned-text writers plus the row layouts of every
// file the command line emits.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactlab/event_study.hpp"
#include "impactlab/impact.hpp"
#include "impactlab/ingest.hpp"
#include "impactlab/order_book.hpp"
#include "impactlab/price_series.hpp"
#include "impactlab/regression.hpp"
#include "impactlab/replay.hpp"

namespace impactlab::report {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const Table& table);
/// Columns padded to their widest cell; the first line is `# <title> manifest=<hash>`.
void write_text(std::ostream& out, const Table& table, std::string_view title, std::string_view manifest_hash);

/// FNV-1a 64-bit, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);

Table tape_table(std::span<const Trade> tape);

inline constexpr std::string_view kTransactionHeader = "stock,order_id,side,V,PI,C,V_p,full_filled,trend,anchor_ms";

/// One transaction-table row; C in CNY-shares.
struct TransactionRow {
    std::string stock;
    OrderId order_id = 0;
    Side side = Side::Buy;
    Shares volume = 0;
    double pi = 0.0;
    std::optional<double> c;
    std::optional<double> prior_volatility;
    bool full_filled = false;
    std::optional<TrendKind> trend;
    Millis anchor_ms = 0;
};

TransactionRow to_row(const InstitutionalTransaction& tx, double tick_size_cny);
Table transaction_table(std::span<const TransactionRow> rows);
/// Throws DataError with a line number on malformed rows.
std::vector<TransactionRow> parse_transactions(std::istream& in);

Table exclusion_table(std::span<const StockReplay> replays);
Table validation_table(const ValidationReport& report);

Table segment_table(std::span<const StockSegment> segments);

struct StockRatio {
    std::string stock_code;
    double r = 0.0;
    TrendGroup group = TrendGroup::Middle;
};
Table ratio_table(std::span<const StockRatio> ratios);
/// Reads `stock_code,r,group` rows; the group is recomputed from r.
std::vector<StockRatio> parse_ratios(std::istream& in);

struct PlotPoint {
    std::string stock_code;
    Date date;
    double adjusted_close = 0.0;
    std::optional<TrendKind> kind;  // none for the first close
};
Table trend_plot_table(std::span<const PlotPoint> points);

/// Asymmetry rows labelled with a stock group ("all" when ungrouped).
struct GroupedAsymmetry {
    std::string group;
    ImpactAsymmetryRow row;
};
Table asymmetry_table(std::span<const GroupedAsymmetry> rows);

/// `subset,bin,side,mean_R,mean_C,count,t_stat,signif`, one row per bin and side.
Table event_study_table(std::span<const EventStudyTable> tables);
Table anova_table(std::span<const EventStudyTable> tables);
/// Tidy plot data: bin midpoint in seconds (0 for the T = 0 bin).
Table event_plot_table(std::span<const EventStudyTable> tables, const EventWindow& window);

struct RegressionRun {
    std::string subset;  // "all" or "full_filled"
    ImpactModel model = ImpactModel::Pooled;
    RegressionResult result;
};
/// `subset,model,coef,value,t_stat,signif`, each run followed by r_square and n rows.
Table regression_table(std::span<const RegressionRun> runs);

}  // namespace impactlab::report
