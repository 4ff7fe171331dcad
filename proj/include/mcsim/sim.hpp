#pragma once

#include "mcsim/arch.hpp"
#include "mcsim/channel.hpp"
#include "mcsim/linkadapt.hpp"
#include "mcsim/sched.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace mcsim::sim {

using channel::Position;

enum class ScenarioMode {
    SingleUe,  ///< each UE runs alone at every position
    AllUes,    ///< all UEs contend for the same cell
};

enum class BlerMode {
    Stochastic,     ///< error with probability bler(sinr) from the seeded generator
    Deterministic,  ///< error iff sinr is below the transmitted MCS threshold
    Off,            ///< never error
};

enum class BackhaulMode {
    Capped,     ///< end-to-end throughput limited by the ON-gNB -> MC link
    Unlimited,  ///< access link only
};

std::string_view to_string(ScenarioMode m);
std::string_view to_string(BlerMode m);
std::string_view to_string(BackhaulMode m);

struct ScenarioConfig {
    arch::ArchKind arch_kind = arch::ArchKind::GnbDuRelay;
    sched::SchedulerKind scheduler;
    channel::RadioConfig radio;
    std::vector<Position> positions;     ///< MC positions along the path
    std::vector<Position> ue_positions;  ///< UE k has ue_id k + 1
    Position on_gnb_position{0.0, 0.0, 15.0};
    int ttis_per_position = 10000;
    double tti_duration_s = 0.5e-3;
    std::uint64_t seed = 1;
    ScenarioMode mode = ScenarioMode::SingleUe;
    int max_retx = 4;

    linkadapt::CqiTable cqi_table = linkadapt::CqiTable::standard(linkadapt::CqiTableId::Table1);
    int re_per_prb = linkadapt::kDefaultRePerPrb;
    double bler_slope_db = linkadapt::kDefaultBlerSlopeDb;
    BlerMode bler_mode = BlerMode::Stochastic;
    BackhaulMode backhaul_mode = BackhaulMode::Capped;

    double crt_limit_s = arch::kMaxContentionResolutionTimer;
    arch::LatencyConfig latencies;
    arch::ProcessingDelays processing;
    arch::HeaderTable headers;

    /// The 21-position, three-UE validation layout.
    static ScenarioConfig defaults();

    /// Throws std::invalid_argument on the first violated invariant.
    void validate() const;

    linkadapt::ResourceGrid grid() const { return {radio.n_prb, re_per_prb}; }
};

struct ResultRow {
    int position_index = 0;
    sched::UeId ue_id = 0;
    double distance_m = 0.0;
    double rsrp_dbm = 0.0;
    double sinr_db = 0.0;
    double mean_cqi = 0.0;
    double throughput_bps = 0.0;
    double tti_share = 0.0;
};

using TtiRecord = sched::TtiRecord;

/// `n` points evenly spaced from `start` to `end`, both included. Throws if n < 2.
std::vector<Position> mc_positions(const Position& start, const Position& end, int n);

/// Full-grid achievable rate on the ON-gNB -> MC link.
double backhaul_capacity(const ScenarioConfig& cfg, const Position& mc);

/// R_i(0): rate of CQI 1 on a single PRB.
double initial_avg_rate(const ScenarioConfig& cfg);

/// Runs cfg.ttis_per_position TTIs with the UEs in `active` (indices into
/// cfg.ue_positions) contending for the cell. Rows come back in ue_id order.
/// When `trace` is set, one record per TTI is appended.
std::vector<ResultRow> run_position(const ScenarioConfig& cfg, int position_index, const Position& mc,
                                    std::span<const std::size_t> active,
                                    std::vector<TtiRecord>* trace = nullptr);

/// All UEs in cfg.ue_positions active together.
std::vector<ResultRow> run_position(const ScenarioConfig& cfg, int position_index, const Position& mc);

struct ScenarioResult {
    std::vector<ResultRow> rows;   ///< ordered by (position_index, ue_id)
    std::vector<TtiRecord> trace;  ///< ordered by (position_index, run, t)
    arch::AttachmentOutcome attachment;
};

struct RunOptions {
    bool trace = false;
    bool parallel = true;
};

/// Runs every position under cfg.mode. UEs cannot attach when the CRT check
/// fails for cfg.arch_kind; rows then report channel metrics with zero throughput.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

inline constexpr std::string_view kResultsCsvHeader =
    "position_index,ue_id,distance_m,rsrp_dbm,sinr_db,mean_cqi,throughput_bps,tti_share";
inline constexpr std::string_view kTraceCsvHeader = "t,ue_id,cqi,mcs,tbs,error,delivered_bits";

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_trace_csv(std::ostream& out, std::span<const TtiRecord> trace);

/// One results row without the trailing newline (shared with sweep output).
std::string format_result_row(const ResultRow& row);

}  // namespace mcsim::sim
