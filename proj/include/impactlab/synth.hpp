#pragma once

// Seeded synthetic order flow and daily price series.
//
// Randomness comes from std::mt19937_64 (its output sequence is fixed by the
// C++ standard) and every variate is derived from its raw 64-bit draws with
// the transforms in this module, never from <random> distributions, whose
// algorithms differ across standard libraries. Fixtures are therefore
// identical on every platform for a given seed.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "impactlab/ingest.hpp"
#include "impactlab/price_series.hpp"
#include "impactlab/types.hpp"

namespace impactlab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n) by rejection (n > 0).
    std::uint64_t below(std::uint64_t n);
    double exponential(double rate);
    /// Number of failures before the first success, success probability p in (0, 1].
    std::int64_t geometric(double p);
    /// Standard normal by Box-Muller (no cached second variate).
    double normal();

private:
    std::mt19937_64 engine_;
};

struct FlowConfig {
    std::uint64_t seed = 1;
    std::string stock_code = "000001";
    Millis duration_ms = 4 * 3600 * 1000;  // continuous-session time, morning then afternoon
    std::size_t max_events = 0;            // 0 = no cap
    double submit_rate = 2.0;              // submits per second per side
    double cancel_rate = 0.05;             // cancellation hazard per live order per second
    double placement_mean_ticks = 3.0;     // mean geometric offset of passive limits from the quote
    double individual_market_prob = 0.15;  // individual submits priced to cross
    Shares size_min_lots = 1;
    Shares size_max_lots = 50;
    double size_shape = 1.5;               // Pareto tail index of lot counts
    Shares lot_size = kDefaultLotSize;
    double institution_fraction = 0.1;
    double institution_size_multiplier = 5.0;
    double institution_market_prob = 0.7;  // institutional submits priced to cross
    Ticks institution_sweep_ticks = 5;     // max ticks beyond the opposite best for crossing limits
    double bid_depth_ratio = 1.0;          // depth of resting bids relative to asks (0.5 = bids thinned 2x)
    Ticks base_price_ticks = 1000;

    /// Throws UsageError on out-of-range fields.
    void validate() const;
};

/// Flat `key = value` text, '#' comments. Unknown keys throw UsageError.
FlowConfig parse_flow_config(std::istream& in, FlowConfig base = {});
void write_flow_config(std::ostream& out, const FlowConfig& config);

/// Deterministic for a fixed config. Prices are placed relative to the
/// evolving book of the generated stream, cancels only target live orders.
std::vector<OrderEvent> gen_flow(const FlowConfig& config);

struct SyntheticMarket {
    std::vector<OrderEvent> events;       // all stocks merged by (timestamp, stock), seq renumbered from 1
    std::vector<StockSummary> summaries;  // float_cap drawn uniformly in [500, 5000) million CNY
};

/// `n_stocks` independent streams sharing `config` except for the stock code
/// (000001, 000002, ...) and the seed, which is drawn per stock from an Rng
/// seeded with config.seed.
SyntheticMarket gen_market(const FlowConfig& config, std::size_t n_stocks);

struct SegmentSpec {
    TrendKind kind = TrendKind::Drawup;
    std::size_t n_days = 1;
    double magnitude = 0.0;  // log change, sign matching kind
};

/// 1 + sum(n_days) closes starting at `base_price` on `start` (weekdays only),
/// log-linear inside each segment, plus iid N(0, noise^2) log noise on every
/// close after the first. Throws UsageError on non-alternating kinds or
/// sign-inconsistent magnitudes.
std::vector<DailyClose> gen_price_series(std::span<const SegmentSpec> spec, double noise, std::uint64_t seed,
                                         double base_price = 10.0, Date start = Date{2003, 1, 2});

}  // namespace impactlab
