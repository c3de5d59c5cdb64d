#include "impactlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "impactlab/csv.hpp"
#include "impactlab/errors.hpp"
#include "impactlab/event_study.hpp"
#include "impactlab/impact.hpp"
#include "impactlab/ingest.hpp"
#include "impactlab/price_series.hpp"
#include "impactlab/regression.hpp"
#include "impactlab/replay.hpp"
#include "impactlab/report.hpp"
#include "impactlab/synth.hpp"

namespace impactlab::cli {

namespace {

namespace fs = std::filesystem;
using report::Table;

struct OrdersInput {
    std::string path;
    std::optional<Date> date;
};

/// "path" or "path@YYYY-MM-DD".
OrdersInput parse_orders_arg(const std::string& arg) {
    const auto at = arg.rfind('@');
    if (at == std::string::npos) return {arg, std::nullopt};
    auto date = parse_date(std::string_view(arg).substr(at + 1));
    if (!date) throw UsageError("bad trading date in '" + arg + "' (expected path@YYYY-MM-DD)");
    return {arg.substr(0, at), date};
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Settings {
    std::vector<OrdersInput> orders;
    std::string closes, actions, summaries, transactions, ratios, segments;
    TrendParams trend;
    double window_s = 60.0;
    double bin_s = 5.0;
    double tick_size = kDefaultTickSizeCny;
    unsigned jobs = default_jobs();
    std::uint64_t seed = 1;
    std::string out;
    std::string model = "all";
    std::string subset = "both";
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double number(std::string_view key, std::string_view v) {
    auto d = csv::parse_double(v);
    if (!d) throw UsageError("config: bad number for " + std::string(key));
    return *d;
}

void apply_config_file(Settings& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (csv::read_line(in, line)) {
        ++lineno;
        std::string_view l = line;
        if (auto h = l.find('#'); h != std::string_view::npos) l = l.substr(0, h);
        l = trim(l);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config " + path + ": line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(l.substr(0, eq)));
        const std::string value(trim(l.substr(eq + 1)));
        if (key == "orders") s.orders.push_back(parse_orders_arg(value));
        else if (key == "closes") s.closes = value;
        else if (key == "actions") s.actions = value;
        else if (key == "summaries") s.summaries = value;
        else if (key == "transactions") s.transactions = value;
        else if (key == "ratios") s.ratios = value;
        else if (key == "segments") s.segments = value;
        else if (key == "theta") s.trend.theta = number(key, value);
        else if (key == "kappa") s.trend.kappa = number(key, value);
        else if (key == "window") s.window_s = number(key, value);
        else if (key == "bin") s.bin_s = number(key, value);
        else if (key == "tick_size") s.tick_size = number(key, value);
        else if (key == "jobs") s.jobs = static_cast<unsigned>(number(key, value));
        else if (key == "seed") s.seed = static_cast<std::uint64_t>(number(key, value));
        else if (key == "out") s.out = value;
        else if (key == "model") s.model = value;
        else if (key == "subset") s.subset = value;
        else throw UsageError("config " + path + ": unknown key '" + key + "'");
    }
}

/// Raw flag values of one subcommand; only flags actually given override the config file.
struct Flags {
    std::string config, out;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> orders;
    std::string closes, actions, summaries, transactions, ratios, segments;
    double theta = 0, kappa = 0, window = 0, bin = 0, tick = 0;
    std::string model, subset;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, std::string("Config file (key = value); default from $") + kConfigEnv);
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--jobs", f.jobs, "Worker threads for per-stock replay (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Seed, recorded in the manifest");
}

bool given(CLI::App* sub, const std::string& name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt && opt->count() > 0;
}

Settings resolve(CLI::App* sub, const Flags& f) {
    Settings s;
    std::string config = f.config;
    if (config.empty())
        if (const char* env = std::getenv(kConfigEnv)) config = env;
    if (!config.empty()) apply_config_file(s, config);

    if (given(sub, "--orders")) {
        s.orders.clear();
        for (const auto& o : f.orders) s.orders.push_back(parse_orders_arg(o));
    }
    if (given(sub, "--out")) s.out = f.out;
    if (given(sub, "--jobs")) s.jobs = f.jobs;
    if (given(sub, "--seed")) s.seed = f.seed;
    if (given(sub, "--closes")) s.closes = f.closes;
    if (given(sub, "--actions")) s.actions = f.actions;
    if (given(sub, "--summaries")) s.summaries = f.summaries;
    if (given(sub, "--transactions")) s.transactions = f.transactions;
    if (given(sub, "--ratios")) s.ratios = f.ratios;
    if (given(sub, "--segments")) s.segments = f.segments;
    if (given(sub, "--theta")) s.trend.theta = f.theta;
    if (given(sub, "--kappa")) s.trend.kappa = f.kappa;
    if (given(sub, "--window")) s.window_s = f.window;
    if (given(sub, "--bin")) s.bin_s = f.bin;
    if (given(sub, "--tick-size")) s.tick_size = f.tick;
    if (given(sub, "--model")) s.model = f.model;
    if (given(sub, "--subset")) s.subset = f.subset;
    if (s.out.empty()) throw UsageError("--out is required");
    if (s.jobs == 0) s.jobs = 1;
    if (!(s.tick_size > 0.0)) throw UsageError("tick size must be positive");
    return s;
}

std::ifstream open_input(const std::string& path, std::string_view role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + std::string(role) + " file " + path);
    return in;
}

std::string slurp(const std::string& path, std::string_view role) {
    auto in = open_input(path, role);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct StockStatus {
    std::string stock;
    std::string date;
    std::string status;
    std::size_t transactions = 0;
};

/// Inputs and parameters of one run. The hash covers input contents and
/// parameters, not paths or the output directory.
class Manifest {
public:
    Manifest(std::string command, const Settings& s) : command_(std::move(command)), out_(s.out) {}

    void input(std::string role, const std::string& path, std::optional<Date> date = std::nullopt) {
        inputs_.push_back({std::move(role), path, date ? date->iso() : "", report::hex64(report::fnv1a(slurp(path, "input")))});
    }
    void param(std::string key, std::string value) { params_.emplace_back(std::move(key), std::move(value)); }
    void stock(StockStatus s) { stocks_.push_back(std::move(s)); }
    void note(std::string n) { notes_.push_back(std::move(n)); }

    std::string hash() const {
        nlohmann::ordered_json j;
        j["tool_version"] = kToolVersion;
        j["command"] = command_;
        for (const auto& i : inputs_) j["inputs"].push_back({i.role, i.date, i.content_hash});
        for (const auto& [k, v] : params_) j["params"][k] = v;
        return report::hex64(report::fnv1a(j.dump()));
    }

    void write(const fs::path& dir) const {
        nlohmann::ordered_json j;
        j["tool"] = "impactlab";
        j["tool_version"] = kToolVersion;
        j["command"] = command_;
        j["hash"] = hash();
        j["inputs"] = nlohmann::ordered_json::array();
        for (const auto& i : inputs_)
            j["inputs"].push_back({{"role", i.role}, {"path", i.path}, {"date", i.date}, {"fnv1a", i.content_hash}});
        j["params"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : params_) j["params"][k] = v;
        j["output_dir"] = out_;
        j["stocks"] = nlohmann::ordered_json::array();
        for (const auto& s : stocks_)
            j["stocks"].push_back(
                {{"stock", s.stock}, {"date", s.date}, {"status", s.status}, {"transactions", s.transactions}});
        j["notes"] = notes_;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << j.dump(2) << '\n';
    }

private:
    struct Input {
        std::string role, path, date, content_hash;
    };
    std::string command_;
    std::string out_;
    std::vector<Input> inputs_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<StockStatus> stocks_;
    std::vector<std::string> notes_;
};

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw UsageError("cannot create output directory " + dir);
    }
    const fs::path& dir() const { return dir_; }

    void csv(const std::string& name, const Table& t) const {
        std::ofstream out(dir_ / (name + ".csv"), std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir_ / (name + ".csv")).string());
        report::write_csv(out, t);
    }
    /// CSV plus its aligned-text rendering stamped with the manifest hash.
    void table(const std::string& name, const Table& t, std::string_view title, const std::string& hash) const {
        csv(name, t);
        std::ofstream out(dir_ / (name + ".txt"), std::ios::binary);
        report::write_text(out, t, title, hash);
    }

private:
    fs::path dir_;
};

// ---- pipeline stages -------------------------------------------------------

ParsedEvents load_orders(const std::string& path, std::ostream& err) {
    auto in = open_input(path, "orders");
    auto parsed = parse_order_events(in);
    for (const auto& d : parsed.diagnostics) err << path << ":" << d.line << ": " << d.message << '\n';
    return parsed;
}

struct SegmentOutput {
    std::map<std::string, std::vector<TrendSegment>> by_stock;
    std::vector<StockSegment> segments;
    std::vector<report::StockRatio> ratios;
    std::vector<report::PlotPoint> plot;
};

SegmentOutput run_segment(const Settings& s, Manifest& manifest, std::ostream& err) {
    auto closes_in = open_input(s.closes, "closes");
    const auto closes = parse_daily_closes(closes_in);
    std::vector<CorporateAction> actions;
    if (!s.actions.empty()) {
        auto in = open_input(s.actions, "actions");
        actions = parse_corporate_actions(in);
    }
    for (const auto& a : actions)
        if (!closes.contains(a.stock_code)) {
            const std::string w = "corporate action for unknown stock " + a.stock_code + " ignored";
            err << "warning: " << w << '\n';
            manifest.note(w);
        }

    SegmentOutput out;
    for (const auto& [stock, series] : closes) {
        std::vector<CorporateAction> own;
        for (const auto& a : actions)
            if (a.stock_code == stock) own.push_back(a);
        const auto adjusted = adjust_prices(series, own, stock);
        for (const auto& w : adjusted.warnings) manifest.note(w);
        const auto seg = segment_trends(adjusted.closes, s.trend);
        if (seg.degenerate) manifest.note("stock " + stock + ": constant close series, degenerate segmentation");
        const double r = drawup_ratio(seg.segments);
        out.ratios.push_back({stock, r, trend_group(r)});
        for (const auto& t : seg.segments) out.segments.push_back({stock, t});
        for (std::size_t i = 0; i < adjusted.closes.size(); ++i) {
            std::optional<TrendKind> kind;
            for (const auto& t : seg.segments)
                if (i >= t.first_day && i <= t.last_day) kind = t.kind;
            out.plot.push_back({stock, adjusted.closes[i].date, adjusted.closes[i].adjusted_close, kind});
        }
        out.by_stock[stock] = seg.segments;
    }
    return out;
}

std::map<std::string, std::vector<TrendSegment>> load_segments(const std::string& path) {
    auto in = open_input(path, "segments");
    std::map<std::string, std::vector<TrendSegment>> out;
    for (auto& s : parse_segments(in)) out[s.stock_code].push_back(s.segment);
    return out;
}

struct ReplayOutput {
    std::vector<StockReplay> replays;
    std::vector<std::optional<Date>> dates;  // per replay
    std::vector<report::TransactionRow> rows;
};

ReplayOutput run_replay(const Settings& s, const std::map<std::string, std::vector<TrendSegment>>* segments,
                        Manifest& manifest, const Output& output, std::ostream& err) {
    if (s.orders.empty()) throw UsageError("--orders is required");
    ReplayConfig cfg;
    cfg.tick_size_cny = s.tick_size;
    ReplayOutput out;
    for (const auto& input : s.orders) {
        const auto parsed = load_orders(input.path, err);
        const auto report = validate_stream(parsed.events);
        if (!report.accepted()) {
            output.csv("validation", report::validation_table(report));
            throw DataError(input.path + ": " + std::to_string(report.hard_count()) +
                            " hard validation finding(s); see validation.csv");
        }
        if (report.soft_count())
            manifest.note(input.path + ": " + std::to_string(report.soft_count()) + " out-of-session event(s) excluded");
        auto replays = replay_all(parsed.events, cfg, s.jobs);
        for (auto& r : replays) {
            if (input.date && segments)
                if (auto it = segments->find(r.stock_code); it != segments->end())
                    assign_trend(r.transactions, *input.date, it->second);
            StockStatus st{r.stock_code, input.date ? input.date->iso() : "", "ok", r.transactions.size()};
            if (r.exclusions.rejected_events) st.status = "ok, " + std::to_string(r.exclusions.rejected_events) + " rejected event(s)";
            manifest.stock(st);
            for (const auto& d : r.diagnostics) err << input.path << ": " << r.stock_code << ": " << d << '\n';
            for (const auto& tx : r.transactions) out.rows.push_back(report::to_row(tx, s.tick_size));
            out.dates.push_back(input.date);
            out.replays.push_back(std::move(r));
        }
    }
    return out;
}

std::string tape_name(const StockReplay& r, const std::optional<Date>& date) {
    return "tape_" + r.stock_code + (date ? "_" + date->iso() : "");
}

std::vector<report::GroupedAsymmetry> asymmetry(std::span<const report::TransactionRow> rows,
                                                const std::vector<report::StockRatio>& ratios) {
    auto as_tx = [](const report::TransactionRow& r) {
        InstitutionalTransaction tx;
        tx.stock_code = r.stock;
        tx.side = r.side;
        tx.pi = r.pi;
        tx.trend = r.trend;
        return tx;
    };
    std::map<std::string, TrendGroup> group_of;
    for (const auto& r : ratios) group_of[r.stock_code] = r.group;

    std::vector<report::GroupedAsymmetry> out;
    for (TrendGroup g : {TrendGroup::Rising, TrendGroup::Middle, TrendGroup::Falling}) {
        std::vector<InstitutionalTransaction> txs;
        for (const auto& r : rows)
            if (auto it = group_of.find(r.stock); it != group_of.end() && it->second == g) txs.push_back(as_tx(r));
        if (txs.empty()) continue;
        for (auto& row : impact_asymmetry(txs)) out.push_back({std::string(trend_group_name(g)), std::move(row)});
    }
    std::vector<InstitutionalTransaction> all;
    for (const auto& r : rows) all.push_back(as_tx(r));
    for (auto& row : impact_asymmetry(all))
        if (row.stock_code == "Total") out.push_back({"all", std::move(row)});
    return out;
}

std::map<std::string, StockSummary> load_summaries(const std::string& path) {
    auto in = open_input(path, "summaries");
    std::map<std::string, StockSummary> out;
    for (auto& s : parse_stock_summaries(in)) out[s.stock_code] = s;
    return out;
}

/// Regression runs for the selected subsets and models. With `strict` a
/// failing run throws; otherwise it is recorded as a manifest note.
std::vector<report::RegressionRun> regressions(std::span<const report::TransactionRow> rows,
                                               const std::map<std::string, StockSummary>& summaries,
                                               const Settings& s, bool strict, Manifest& manifest,
                                               std::ostream& err) {
    std::vector<ImpactModel> models;
    if (s.model == "all") models = {ImpactModel::Pooled, ImpactModel::Purchases, ImpactModel::Sales};
    else if (s.model == "pooled") models = {ImpactModel::Pooled};
    else if (s.model == "purchases") models = {ImpactModel::Purchases};
    else if (s.model == "sales") models = {ImpactModel::Sales};
    else throw UsageError("--model must be one of all, pooled, purchases, sales");
    std::vector<bool> subsets;  // full_filled_only
    if (s.subset == "both") subsets = {false, true};
    else if (s.subset == "all") subsets = {false};
    else if (s.subset == "full_filled") subsets = {true};
    else throw UsageError("--subset must be one of both, all, full_filled");

    std::vector<ImpactObservation> obs;
    std::size_t no_c = 0, no_vp = 0, no_cap = 0;
    for (const auto& r : rows) {
        const auto it = summaries.find(r.stock);
        if (it == summaries.end()) { ++no_cap; continue; }
        if (!r.c) { ++no_c; continue; }
        if (!r.prior_volatility) { ++no_vp; continue; }
        obs.push_back({r.pi, it->second.float_cap, *r.c, *r.prior_volatility, r.side, r.full_filled});
    }
    if (no_c + no_vp + no_cap) {
        const std::string n = "regression excluded " + std::to_string(no_c) + " row(s) without C, " +
                              std::to_string(no_vp) + " without V_p, " + std::to_string(no_cap) + " without C_f";
        err << n << '\n';
        manifest.note(n);
    }

    std::vector<report::RegressionRun> runs;
    for (bool ff : subsets)
        for (ImpactModel m : models) {
            try {
                runs.push_back({ff ? "full_filled" : "all", m, regress_price_impact(obs, m, ff)});
            } catch (const NumericalError& e) {
                if (strict) throw;
                const std::string n = std::string("regression ") + (ff ? "full_filled/" : "all/") +
                                      std::string(model_name(m)) + " skipped: " + e.what();
                err << n << '\n';
                manifest.note(n);
            }
        }
    return runs;
}

EventWindow event_window(const Settings& s) {
    if (!(s.window_s > 0.0) || !(s.bin_s > 0.0)) throw UsageError("window and bin must be positive");
    EventWindow w;
    w.window_ms = std::llround(s.window_s * 1000.0);
    w.bin_ms = std::llround(s.bin_s * 1000.0);
    w.validate();
    return w;
}

void record_trend_params(Manifest& m, const Settings& s) {
    m.param("theta", csv::fmt(s.trend.theta));
    m.param("kappa", csv::fmt(s.trend.kappa));
    m.param("group_thresholds", "0.55/0.45");
}

// ---- commands ---------------------------------------------------------------

int cmd_ingest(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.orders.size() != 1) throw UsageError("ingest takes exactly one --orders file");
    const Output output(s.out);
    const auto parsed = load_orders(s.orders[0].path, err);
    const auto report = validate_stream(parsed.events);

    std::map<std::string, StockSummary> caps;
    if (!s.summaries.empty()) caps = load_summaries(s.summaries);
    auto summaries = summarize_institutional_orders(parsed.events);
    for (auto& row : summaries)
        if (auto it = caps.find(row.stock_code); it != caps.end()) row.float_cap = it->second.float_cap;

    {
        std::ofstream ev(output.dir() / "events.csv", std::ios::binary);
        write_order_events(ev, parsed.events);
        std::ofstream sm(output.dir() / "summaries.csv", std::ios::binary);
        write_stock_summaries(sm, summaries);
    }
    output.csv("validation", report::validation_table(report));
    if (!s.actions.empty()) {
        auto in = open_input(s.actions, "actions");
        const auto actions = parse_corporate_actions(in);
        std::ofstream ca(output.dir() / "corporate_actions.csv", std::ios::binary);
        write_corporate_actions(ca, actions);
        out << "corporate actions: " << actions.size() << '\n';
    }
    out << "accepted " << parsed.accepted << ", rejected " << parsed.rejected << ", findings " << report.hard_count()
        << " hard / " << report.soft_count() << " soft\n";
    if (!report.accepted()) {
        err << "stream rejected: hard validation findings\n";
        return 2;
    }
    return 0;
}

int cmd_replay(const Settings& s, std::ostream& out, std::ostream& err) {
    const Output output(s.out);
    Manifest manifest("replay", s);
    for (const auto& o : s.orders) manifest.input("orders", o.path, o.date);
    std::optional<std::map<std::string, std::vector<TrendSegment>>> segments;
    if (!s.segments.empty()) {
        manifest.input("segments", s.segments);
        segments = load_segments(s.segments);
    }
    manifest.param("tick_size", csv::fmt(s.tick_size));
    const auto hash = manifest.hash();

    const auto rep = run_replay(s, segments ? &*segments : nullptr, manifest, output, err);
    std::size_t trades = 0;
    for (std::size_t i = 0; i < rep.replays.size(); ++i) {
        output.csv(tape_name(rep.replays[i], rep.dates[i]), report::tape_table(rep.replays[i].tape));
        trades += rep.replays[i].tape.size();
    }
    output.table("transactions", report::transaction_table(rep.rows), "institutional transactions", hash);
    output.table("exclusions", report::exclusion_table(rep.replays), "replay exclusions", hash);
    manifest.write(output.dir());
    out << "replayed " << rep.replays.size() << " stock-day(s): " << trades << " trades, " << rep.rows.size()
        << " institutional transactions\n";
    return 0;
}

int cmd_segment(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.closes.empty()) throw UsageError("--closes is required");
    const Output output(s.out);
    Manifest manifest("segment", s);
    manifest.input("closes", s.closes);
    if (!s.actions.empty()) manifest.input("actions", s.actions);
    record_trend_params(manifest, s);
    const auto hash = manifest.hash();

    const auto seg = run_segment(s, manifest, err);
    output.table("segments", report::segment_table(seg.segments), "trend segments", hash);
    output.table("ratios", report::ratio_table(seg.ratios), "drawup ratio", hash);
    output.csv("trend_plot", report::trend_plot_table(seg.plot));
    manifest.write(output.dir());
    for (const auto& r : seg.ratios)
        out << r.stock_code << ": " << seg.by_stock.at(r.stock_code).size() << " segment(s), r = " << csv::fmt(r.r)
            << " (" << trend_group_name(r.group) << ")\n";
    return 0;
}

int cmd_impact(const Settings& s, std::ostream& out, std::ostream&) {
    if (s.transactions.empty()) throw UsageError("--transactions is required");
    const Output output(s.out);
    Manifest manifest("impact", s);
    manifest.input("transactions", s.transactions);
    if (!s.ratios.empty()) manifest.input("ratios", s.ratios);
    const auto hash = manifest.hash();

    auto in = open_input(s.transactions, "transactions");
    const auto rows = report::parse_transactions(in);
    std::vector<report::StockRatio> ratios;
    if (!s.ratios.empty()) {
        auto rin = open_input(s.ratios, "ratios");
        ratios = report::parse_ratios(rin);
    }
    const auto table = asymmetry(rows, ratios);
    output.table("impact", report::asymmetry_table(table), "mean price impact, purchases vs sales", hash);
    manifest.write(output.dir());
    out << "impact table: " << table.size() << " row(s) from " << rows.size() << " transaction(s)\n";
    return 0;
}

int cmd_eventstudy(const Settings& s, std::ostream& out, std::ostream& err) {
    const auto window = event_window(s);
    const Output output(s.out);
    Manifest manifest("eventstudy", s);
    for (const auto& o : s.orders) manifest.input("orders", o.path, o.date);
    manifest.param("tick_size", csv::fmt(s.tick_size));
    manifest.param("window_ms", std::to_string(window.window_ms));
    manifest.param("bin_ms", std::to_string(window.bin_ms));
    const auto hash = manifest.hash();

    const auto rep = run_replay(s, nullptr, manifest, output, err);
    const auto tables = event_study_by_volume(rep.replays, window, s.tick_size);
    output.table("eventstudy", report::event_study_table(tables), "event study: mean R and mean C per bin", hash);
    output.table("eventstudy_anova", report::anova_table(tables), "event study: ANOVA of C across bins", hash);
    output.csv("eventstudy_plot", report::event_plot_table(tables, window));
    manifest.write(output.dir());
    out << "event study over " << rep.rows.size() << " institutional transaction(s)\n";
    return 0;
}

int cmd_regress(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.transactions.empty()) throw UsageError("--transactions is required");
    if (s.summaries.empty()) throw UsageError("--summaries is required");
    const Output output(s.out);
    Manifest manifest("regress", s);
    manifest.input("transactions", s.transactions);
    manifest.input("summaries", s.summaries);
    manifest.param("model", s.model);
    manifest.param("subset", s.subset);
    const auto hash = manifest.hash();

    auto in = open_input(s.transactions, "transactions");
    const auto rows = report::parse_transactions(in);
    const auto runs = regressions(rows, load_summaries(s.summaries), s, true, manifest, err);
    output.table("regression", report::regression_table(runs), "price impact regression", hash);
    manifest.write(output.dir());
    out << "regression: " << runs.size() << " model(s)\n";
    return 0;
}

int cmd_report(const Settings& s, std::ostream& out, std::ostream& err) {
    const auto window = event_window(s);
    const Output output(s.out);
    Manifest manifest("report", s);
    for (const auto& o : s.orders) manifest.input("orders", o.path, o.date);
    if (!s.closes.empty()) manifest.input("closes", s.closes);
    if (!s.actions.empty()) manifest.input("actions", s.actions);
    if (!s.summaries.empty()) manifest.input("summaries", s.summaries);
    record_trend_params(manifest, s);
    manifest.param("tick_size", csv::fmt(s.tick_size));
    manifest.param("window_ms", std::to_string(window.window_ms));
    manifest.param("bin_ms", std::to_string(window.bin_ms));
    manifest.param("model", s.model);
    manifest.param("subset", s.subset);
    manifest.param("seed", std::to_string(s.seed));
    const auto hash = manifest.hash();

    std::optional<SegmentOutput> seg;
    if (!s.closes.empty()) {
        seg = run_segment(s, manifest, err);
        output.table("segments", report::segment_table(seg->segments), "trend segments", hash);
        output.table("ratios", report::ratio_table(seg->ratios), "drawup ratio", hash);
        output.csv("trend_plot", report::trend_plot_table(seg->plot));
    }

    const auto rep = run_replay(s, seg ? &seg->by_stock : nullptr, manifest, output, err);
    for (std::size_t i = 0; i < rep.replays.size(); ++i)
        output.csv(tape_name(rep.replays[i], rep.dates[i]), report::tape_table(rep.replays[i].tape));
    output.table("transactions", report::transaction_table(rep.rows), "institutional transactions", hash);
    output.table("exclusions", report::exclusion_table(rep.replays), "replay exclusions", hash);

    const auto asym = asymmetry(rep.rows, seg ? seg->ratios : std::vector<report::StockRatio>{});
    output.table("impact", report::asymmetry_table(asym), "mean price impact, purchases vs sales", hash);

    const auto tables = event_study_by_volume(rep.replays, window, s.tick_size);
    output.table("eventstudy", report::event_study_table(tables), "event study: mean R and mean C per bin", hash);
    output.table("eventstudy_anova", report::anova_table(tables), "event study: ANOVA of C across bins", hash);
    output.csv("eventstudy_plot", report::event_plot_table(tables, window));

    if (!s.summaries.empty()) {
        const auto runs = regressions(rep.rows, load_summaries(s.summaries), s, false, manifest, err);
        output.table("regression", report::regression_table(runs), "price impact regression", hash);
    } else {
        manifest.note("no summaries given: regression skipped");
    }
    manifest.write(output.dir());
    out << "report " << hash << ": " << rep.replays.size() << " stock-day(s), " << rep.rows.size()
        << " institutional transactions -> " << s.out << '\n';
    return 0;
}

std::vector<SegmentSpec> parse_segment_spec(const std::string& text) {
    // kind:n_days:magnitude, comma separated
    std::vector<SegmentSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find(':');
        const auto b = item.find(':', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) throw UsageError("bad segment spec '" + item + "'");
        const std::string kind = item.substr(0, a);
        auto n = csv::parse_uint(std::string_view(item).substr(a + 1, b - a - 1));
        auto mag = csv::parse_double(std::string_view(item).substr(b + 1));
        if ((kind != "drawup" && kind != "drawdown") || !n || !mag)
            throw UsageError("bad segment spec '" + item + "' (expected drawup|drawdown:n_days:magnitude)");
        out.push_back({kind == "drawup" ? TrendKind::Drawup : TrendKind::Drawdown, static_cast<std::size_t>(*n), *mag});
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Order-book replay and institutional price-impact analytics", "impactlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::map<std::string, Flags> flags;
    auto sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, flags[name]);
        return s;
    };
    auto orders = [&](CLI::App* s, const std::string& name) {
        s->add_option("--orders", flags[name].orders, "Order-event CSV, optionally path@YYYY-MM-DD (repeatable)");
    };
    auto trend = [&](CLI::App* s, const std::string& name) {
        s->add_option("--theta", flags[name].theta, "Continuation fraction (default 0.30)");
        s->add_option("--kappa", flags[name].kappa, "Daily-mean multiple (default 3.0)");
    };
    auto tick = [&](CLI::App* s, const std::string& name) {
        s->add_option("--tick-size", flags[name].tick, "Tick size in CNY (default 0.01)");
    };
    auto window = [&](CLI::App* s, const std::string& name) {
        s->add_option("--window", flags[name].window, "Half-width of the event window in seconds (default 60)");
        s->add_option("--bin", flags[name].bin, "Bin width in seconds (default 5)");
    };
    auto regress_opts = [&](CLI::App* s, const std::string& name) {
        s->add_option("--model", flags[name].model, "all | pooled | purchases | sales");
        s->add_option("--subset", flags[name].subset, "both | all | full_filled");
    };

    auto* ingest = sub("ingest", "Parse and validate an order-event file");
    orders(ingest, "ingest");
    ingest->add_option("--actions", flags["ingest"].actions, "Corporate-action CSV to validate");
    ingest->add_option("--summaries", flags["ingest"].summaries, "Stock summary CSV supplying float caps");

    auto* replay = sub("replay", "Replay order flow into trade tapes and institutional transactions");
    orders(replay, "replay");
    replay->add_option("--segments", flags["replay"].segments, "Segment CSV for trend context");
    tick(replay, "replay");

    auto* segment = sub("segment", "Adjust daily closes and segment drawups/drawdowns");
    segment->add_option("--closes", flags["segment"].closes, "Daily close CSV");
    segment->add_option("--actions", flags["segment"].actions, "Corporate-action CSV");
    trend(segment, "segment");

    auto* impact = sub("impact", "Mean price impact of purchases vs sales by trend");
    impact->add_option("--transactions", flags["impact"].transactions, "Transaction CSV from replay");
    impact->add_option("--ratios", flags["impact"].ratios, "Ratio CSV from segment, for stock groups");

    auto* eventstudy = sub("eventstudy", "Binned mean R and mean C around institutional transactions");
    orders(eventstudy, "eventstudy");
    window(eventstudy, "eventstudy");
    tick(eventstudy, "eventstudy");

    auto* regress = sub("regress", "Standardized price-impact regression");
    regress->add_option("--transactions", flags["regress"].transactions, "Transaction CSV from replay");
    regress->add_option("--summaries", flags["regress"].summaries, "Stock summary CSV with float caps");
    regress_opts(regress, "regress");

    auto* rep = sub("report", "Full pipeline: segment, replay, impact, event study, regression");
    orders(rep, "report");
    rep->add_option("--closes", flags["report"].closes, "Daily close CSV");
    rep->add_option("--actions", flags["report"].actions, "Corporate-action CSV");
    rep->add_option("--summaries", flags["report"].summaries, "Stock summary CSV with float caps");
    trend(rep, "report");
    window(rep, "report");
    tick(rep, "report");
    regress_opts(rep, "report");

    auto* synth = app.add_subcommand("synth", "Generate synthetic order flow or daily closes");
    synth->require_subcommand(1);
    std::string synth_config, synth_out, spec, stock = "000001", start = "2003-01-02";
    std::uint64_t synth_seed = 0;
    std::size_t n_stocks = 1;
    double noise = 0.0, base = 10.0;
    unsigned synth_jobs = 1;
    auto* flow = synth->add_subcommand("flow", "Seeded order-event stream(s)");
    auto* prices = synth->add_subcommand("prices", "Daily closes with a known segmentation");
    for (auto* s : {flow, prices}) {
        s->add_option("--out", synth_out, "Output directory")->required();
        s->add_option("--seed", synth_seed, "Seed (overrides the config)");
        s->add_option("--jobs", synth_jobs, "Accepted for uniformity; generation is sequential");
    }
    flow->add_option("--config", synth_config, "Flow config file (key = value)");
    flow->add_option("--stocks", n_stocks, "Number of stocks")->check(CLI::PositiveNumber);
    prices->add_option("--spec", spec, "Segments as kind:n_days:log_magnitude,...")->required();
    prices->add_option("--noise", noise, "Log-noise standard deviation");
    prices->add_option("--stock", stock, "Stock code");
    prices->add_option("--start", start, "First date");
    prices->add_option("--base", base, "First close in CNY");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) {
            const Output output(synth_out);
            if (*flow) {
                FlowConfig cfg;
                if (!synth_config.empty()) {
                    std::ifstream in(synth_config);
                    if (!in) throw UsageError("cannot open flow config " + synth_config);
                    cfg = parse_flow_config(in);
                }
                if (flow->get_option("--seed")->count()) cfg.seed = synth_seed;
                const auto market = gen_market(cfg, n_stocks);
                std::ofstream ev(output.dir() / "orders.csv", std::ios::binary);
                write_order_events(ev, market.events);
                std::ofstream sm(output.dir() / "summaries.csv", std::ios::binary);
                write_stock_summaries(sm, market.summaries);
                std::ofstream fc(output.dir() / "flow_config.txt", std::ios::binary);
                write_flow_config(fc, cfg);
                out << "generated " << market.events.size() << " events for " << n_stocks << " stock(s)\n";
            } else {
                const auto segs = parse_segment_spec(spec);
                const auto first = parse_date(start);
                if (!first) throw UsageError("bad --start date");
                if (stock.empty() || stock.find(',') != std::string::npos) throw UsageError("bad --stock");
                const auto closes = gen_price_series(segs, noise, prices->get_option("--seed")->count() ? synth_seed : 1,
                                                     base, *first);
                std::ofstream cl(output.dir() / "closes.csv", std::ios::binary);
                cl << kDailyCloseHeader << '\n';
                for (const auto& c : closes) {
                    char px[32];
                    std::snprintf(px, sizeof px, "%.4f", c.raw_close);
                    cl << stock << ',' << c.date.iso() << ',' << px << '\n';
                }
                out << "generated " << closes.size() << " closes\n";
            }
            return 0;
        }
        for (const auto& [name, fn] : std::vector<std::pair<std::string, int (*)(const Settings&, std::ostream&, std::ostream&)>>{
                 {"ingest", cmd_ingest},
                 {"replay", cmd_replay},
                 {"segment", cmd_segment},
                 {"impact", cmd_impact},
                 {"eventstudy", cmd_eventstudy},
                 {"regress", cmd_regress},
                 {"report", cmd_report}}) {
            auto* s = app.get_subcommand(name);
            if (*s) return fn(resolve(s, flags[name]), out, err);
        }
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace impactlab::cli
