#include "mcsim/sim.hpp"

#include "mcsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace mcsim::sim {

std::string_view to_string(ScenarioMode m)
{
    return m == ScenarioMode::SingleUe ? "single" : "all";
}

std::string_view to_string(BlerMode m)
{
    switch (m) {
    case BlerMode::Stochastic: return "stochastic";
    case BlerMode::Deterministic: return "deterministic";
    case BlerMode::Off: return "off";
    }
    return "unknown";
}

std::string_view to_string(BackhaulMode m)
{
    return m == BackhaulMode::Capped ? "capped" : "unlimited";
}

ScenarioConfig ScenarioConfig::defaults()
{
    ScenarioConfig cfg;
    cfg.positions = mc_positions({1000.0, 25.0, 15.0}, {1990.0, 1225.0, 15.0}, 21);
    cfg.ue_positions = {{1000.0, 0.0, 2.0}, {1495.0, 625.0, 2.0}, {2050.0, 1250.0, 2.0}};
    return cfg;
}

void ScenarioConfig::validate() const
{
    scheduler.validate();
    radio.validate();
    if (positions.empty()) {
        throw std::invalid_argument("at least one MC position is required");
    }
    if (ue_positions.empty()) {
        throw std::invalid_argument("at least one UE is required");
    }
    for (const auto& p : positions) channel::validate(p);
    for (const auto& p : ue_positions) channel::validate(p);
    channel::validate(on_gnb_position);
    if (ttis_per_position < 1) {
        throw std::invalid_argument("ttis_per_position must be >= 1");
    }
    if (!(tti_duration_s > 0.0)) {
        throw std::invalid_argument("TTI duration must be > 0");
    }
    if (max_retx < 0) {
        throw std::invalid_argument("max_retx must be >= 0");
    }
    if (re_per_prb < 1) {
        throw std::invalid_argument("re_per_prb must be >= 1");
    }
    if (!(bler_slope_db > 0.0)) {
        throw std::invalid_argument("BLER slope must be > 0");
    }
    if (!(crt_limit_s > 0.0)) {
        throw std::invalid_argument("CRT limit must be > 0");
    }
}

std::vector<Position> mc_positions(const Position& start, const Position& end, int n)
{
    if (n < 2) {
        throw std::invalid_argument("mc_positions needs n >= 2");
    }
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(n));
    const double steps = n - 1;
    for (int i = 0; i < n; ++i) {
        const double f = i / steps;
        out.push_back({start.x + f * (end.x - start.x), start.y + f * (end.y - start.y),
                       start.h + f * (end.h - start.h)});
    }
    out.back() = end;
    return out;
}

double backhaul_capacity(const ScenarioConfig& cfg, const Position& mc)
{
    const auto link = channel::evaluate_link(cfg.radio, cfg.on_gnb_position, mc);
    const auto decision = linkadapt::select_mcs(link.sinr_db, cfg.cqi_table, cfg.grid(), cfg.bler_slope_db);
    return linkadapt::achievable_rate(decision, cfg.tti_duration_s);
}

double initial_avg_rate(const ScenarioConfig& cfg)
{
    const auto bits = linkadapt::tbs(cfg.cqi_table.entry(1), 1, cfg.re_per_prb);
    return static_cast<double>(bits) / cfg.tti_duration_s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream per (position, active subset).
std::uint64_t run_seed(std::uint64_t seed, int position_index, std::span<const std::size_t> active)
{
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(position_index));
    for (const auto idx : active) {
        s = splitmix64(s ^ (static_cast<std::uint64_t>(idx) + 1) * 0x100000001B3ULL);
    }
    return s;
}

// Uniform in [0, 1) from the top 53 bits; mt19937_64 output is fully specified.
double uniform01(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct PendingBlock {
    std::int64_t tbs = 0;
    int retx_done = 0;
};

struct UeLink {
    channel::LinkState link;
    linkadapt::McsDecision decision;
};

UeLink evaluate_ue(const ScenarioConfig& cfg, const Position& mc, std::size_t ue_index)
{
    UeLink u;
    u.link = channel::evaluate_link(cfg.radio, mc, cfg.ue_positions[ue_index]);
    u.decision = linkadapt::select_mcs(u.link.sinr_db, cfg.cqi_table, cfg.grid(), cfg.bler_slope_db);
    return u;
}

ResultRow channel_row(int position_index, std::size_t ue_index, const UeLink& u)
{
    ResultRow row;
    row.position_index = position_index;
    row.ue_id = static_cast<sched::UeId>(ue_index) + 1;
    row.distance_m = u.link.distance_3d;
    row.rsrp_dbm = u.link.rsrp_dbm;
    row.sinr_db = u.link.sinr_db;
    row.mean_cqi = u.decision.cqi;
    return row;
}

}  // namespace

std::vector<ResultRow> run_position(const ScenarioConfig& cfg, int position_index, const Position& mc,
                                    std::span<const std::size_t> active, std::vector<TtiRecord>* trace)
{
    std::vector<std::size_t> order(active.begin(), active.end());
    std::sort(order.begin(), order.end());
    for (const auto idx : order) {
        if (idx >= cfg.ue_positions.size()) {
            throw std::out_of_range("active UE index out of range");
        }
    }

    const std::size_t n = order.size();
    std::vector<UeLink> links;
    std::vector<sched::UeSchedState> states;
    links.reserve(n);
    states.reserve(n);
    const double r0 = initial_avg_rate(cfg);
    for (const auto idx : order) {
        links.push_back(evaluate_ue(cfg, mc, idx));
        sched::UeSchedState s;
        s.ue_id = static_cast<sched::UeId>(idx) + 1;
        s.avg_rate = r0;
        states.push_back(s);
    }

    std::mt19937_64 gen(run_seed(cfg.seed, position_index, order));
    const auto draw_error = [&](std::size_t i, const linkadapt::McsDecision& dec) {
        const auto& entry = cfg.cqi_table.entry(dec.cqi);
        switch (cfg.bler_mode) {
        case BlerMode::Stochastic:
            return uniform01(gen) < linkadapt::bler(links[i].link.sinr_db, entry, cfg.cqi_table, cfg.bler_slope_db);
        case BlerMode::Deterministic:
            return links[i].link.sinr_db < *entry.sinr_threshold_db;
        case BlerMode::Off:
            return false;
        }
        return false;
    };

    std::vector<std::optional<PendingBlock>> pending(n);
    std::vector<std::int64_t> delivered(n, 0);
    std::vector<std::int64_t> scheduled(n, 0);
    std::vector<double> cqi_sum(n, 0.0);
    std::vector<linkadapt::McsDecision> decisions(n);
    const std::int64_t t0 = static_cast<std::int64_t>(position_index) * cfg.ttis_per_position;

    for (int k = 0; k < cfg.ttis_per_position; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            decisions[i] = links[i].decision;
            if (pending[i]) {
                decisions[i].tbs = pending[i]->tbs;
            }
            cqi_sum[i] += links[i].decision.cqi;
        }
        const auto rec = sched::run_tti(cfg.scheduler, states, decisions, draw_error, t0 + k, cfg.tti_duration_s);
        if (rec.ue_id) {
            std::size_t i = 0;
            while (states[i].ue_id != *rec.ue_id) {
                ++i;
            }
            ++scheduled[i];
            delivered[i] += rec.delivered_bits;
            if (!rec.error) {
                pending[i].reset();
            } else if (!pending[i]) {
                if (cfg.max_retx > 0) {
                    pending[i] = PendingBlock{rec.tbs, 0};
                }
            } else if (++pending[i]->retx_done >= cfg.max_retx) {
                pending[i].reset();  // dropped
            }
        }
        if (trace) {
            trace->push_back(rec);
        }
    }

    const double elapsed = cfg.ttis_per_position * cfg.tti_duration_s;
    std::vector<ResultRow> rows;
    rows.reserve(n);
    std::int64_t total_bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = channel_row(position_index, order[i], links[i]);
        row.mean_cqi = cqi_sum[i] / cfg.ttis_per_position;
        row.throughput_bps = static_cast<double>(delivered[i]) / elapsed;
        row.tti_share = static_cast<double>(scheduled[i]) / cfg.ttis_per_position;
        rows.push_back(row);
        total_bits += delivered[i];
    }

    if (cfg.backhaul_mode == BackhaulMode::Capped && total_bits > 0) {
        const double capacity = backhaul_capacity(cfg, mc);
        for (std::size_t i = 0; i < n; ++i) {
            const double share = static_cast<double>(delivered[i]) / static_cast<double>(total_bits);
            rows[i].throughput_bps = std::min(rows[i].throughput_bps, capacity * share);
        }
    }
    return rows;
}

std::vector<ResultRow> run_position(const ScenarioConfig& cfg, int position_index, const Position& mc)
{
    std::vector<std::size_t> all(cfg.ue_positions.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return run_position(cfg, position_index, mc, all);
}

namespace {

struct PositionOutput {
    std::vector<ResultRow> rows;
    std::vector<TtiRecord> trace;
};

PositionOutput run_one_position(const ScenarioConfig& cfg, int position_index, bool attached, bool with_trace)
{
    PositionOutput out;
    const auto& mc = cfg.positions[static_cast<std::size_t>(position_index)];
    const std::size_t n_ues = cfg.ue_positions.size();
    auto* trace = with_trace ? &out.trace : nullptr;

    if (!attached) {
        for (std::size_t i = 0; i < n_ues; ++i) {
            out.rows.push_back(channel_row(position_index, i, evaluate_ue(cfg, mc, i)));
        }
        return out;
    }
    if (cfg.mode == ScenarioMode::AllUes) {
        std::vector<std::size_t> all(n_ues);
        for (std::size_t i = 0; i < n_ues; ++i) {
            all[i] = i;
        }
        out.rows = run_position(cfg, position_index, mc, all, trace);
    } else {
        for (std::size_t i = 0; i < n_ues; ++i) {
            const std::size_t one[] = {i};
            auto rows = run_position(cfg, position_index, mc, one, trace);
            out.rows.insert(out.rows.end(), rows.begin(), rows.end());
        }
    }
    return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options)
{
    cfg.validate();
    ScenarioResult result;
    const auto model = arch::build_arch(cfg.arch_kind, cfg.latencies, cfg.headers);
    result.attachment = arch::crt_check(model, cfg.crt_limit_s, cfg.processing);
    const bool attached = result.attachment.success;

    const int n_pos = static_cast<int>(cfg.positions.size());
    std::vector<PositionOutput> outputs(static_cast<std::size_t>(n_pos));
    if (options.parallel && n_pos > 1) {
        std::vector<std::future<PositionOutput>> futures;
        futures.reserve(outputs.size());
        for (int p = 0; p < n_pos; ++p) {
            futures.push_back(std::async(std::launch::async, run_one_position, std::cref(cfg), p, attached,
                                         options.trace));
        }
        for (int p = 0; p < n_pos; ++p) {
            outputs[static_cast<std::size_t>(p)] = futures[static_cast<std::size_t>(p)].get();
        }
    } else {
        for (int p = 0; p < n_pos; ++p) {
            outputs[static_cast<std::size_t>(p)] = run_one_position(cfg, p, attached, options.trace);
        }
    }

    for (auto& o : outputs) {
        result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
        result.trace.insert(result.trace.end(), o.trace.begin(), o.trace.end());
    }
    return result;
}

std::string format_result_row(const ResultRow& r)
{
    std::string s;
    s += csv::format(r.position_index);
    s += ',' + csv::format(r.ue_id);
    s += ',' + csv::format(r.distance_m);
    s += ',' + csv::format(r.rsrp_dbm);
    s += ',' + csv::format(r.sinr_db);
    s += ',' + csv::format(r.mean_cqi);
    s += ',' + csv::format(r.throughput_bps);
    s += ',' + csv::format(r.tti_share);
    return s;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows)
{
    out << kResultsCsvHeader << '\n';
    for (const auto& r : rows) {
        out << format_result_row(r) << '\n';
    }
}

void write_trace_csv(std::ostream& out, std::span<const TtiRecord> trace)
{
    out << kTraceCsvHeader << '\n';
    for (const auto& t : trace) {
        out << t.t << ',';
        if (t.ue_id) out << *t.ue_id;
        out << ',' << t.cqi << ',';
        if (t.mcs_index) out << *t.mcs_index;
        out << ',' << t.tbs << ',' << (t.error ? 1 : 0) << ',' << t.delivered_bits << '\n';
    }
}

}  // namespace mcsim::sim
