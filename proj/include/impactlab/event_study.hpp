#pragma once

// Binned mean return and mean C around institutional transactions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactlab/replay.hpp"
#include "impactlab/stats.hpp"

namespace impactlab {

/// Window of +-window_ms split into bin_ms slices plus a singleton bin at T = 0:
/// [-w,-w+b), ..., [-b,0), {0}, (0,b], ..., (w-b,w].
struct EventWindow {
    Millis window_ms = 60'000;
    Millis bin_ms = 5'000;

    /// Throws UsageError unless bin_ms > 0 divides window_ms.
    void validate() const;
    std::size_t bins_per_side() const { return static_cast<std::size_t>(window_ms / bin_ms); }
    std::size_t bin_count() const { return 2 * bins_per_side() + 1; }
    std::size_t zero_bin() const { return bins_per_side(); }
    std::string label(std::size_t bin) const;
};

enum class VolumeSubset { SmallV, LargeV, Total };

std::string_view subset_name(VolumeSubset s);

struct BinSide {
    double mean_r = 0.0;
    double mean_c = 0.0;  // CNY-shares
    std::size_t count = 0;  // trades with a return
    std::size_t c_count = 0;
};

struct EventBin {
    std::string label;
    BinSide purchase;
    BinSide sale;
    std::optional<stats::TTestResult> t;  // |R| purchases vs sales
};

struct EventStudyTable {
    VolumeSubset subset = VolumeSubset::Total;
    std::vector<EventBin> bins;
    std::optional<stats::AnovaResult> anova_purchase;  // C across bins
    std::optional<stats::AnovaResult> anova_sale;
    std::size_t anchors_purchase = 0;
    std::size_t anchors_sale = 0;
    std::size_t truncated = 0;  // anchors whose window crosses a session boundary
};

/// Handle of one transaction inside a set of replays.
struct TransactionRef {
    std::size_t replay = 0;
    std::size_t transaction = 0;
};

/// Every transaction of every replay.
std::vector<TransactionRef> all_transactions(std::span<const StockReplay> replays);

/// Pools `selected` across replays. Surrounding trades are binned by time
/// relative to the anchor; the transaction's arrival fills form the T = 0 bin,
/// whose C is the transaction's pre-arrival C. Same-millisecond trades that are
/// not arrival fills go to the bin after or before T = 0 by tape order.
EventStudyTable event_study(std::span<const StockReplay> replays, std::span<const TransactionRef> selected,
                            VolumeSubset subset, const EventWindow& window = {}, double tick_size_cny = kDefaultTickSizeCny);

/// Small, large and total tables with the volume split pooled over all replays.
std::vector<EventStudyTable> event_study_by_volume(std::span<const StockReplay> replays,
                                                   const EventWindow& window = {},
                                                   double tick_size_cny = kDefaultTickSizeCny);

}  // namespace impactlab
