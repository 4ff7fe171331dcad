#pragma once

#include "mcsim/linkadapt.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

namespace mcsim::sched {

using UeId = int;

enum class Policy {
    MaxThroughput,         ///< priority d
    BlindEqualThroughput,  ///< priority 1/R
    ProportionalFair,      ///< priority d/R
};

std::string_view to_string(Policy p);
Policy parse_policy(std::string_view name);

inline constexpr double kDefaultAlpha = 0.01;

/// Scheduling discipline plus the moving-average weight on r_i(t).
struct SchedulerKind {
    Policy policy = Policy::ProportionalFair;
    double alpha = kDefaultAlpha;

    /// alpha = 1 / w for a window of `w` TTIs.
    static SchedulerKind with_window(Policy policy, double window_ttis);

    void validate() const;
};

/// Per-UE scheduler bookkeeping. `avg_rate` enters a TTI as R_i(t-1) and
/// leaves it as R_i(t).
struct UeSchedState {
    UeId ue_id = 0;
    double achievable_rate = 0.0;  ///< d_i(t), bit/s
    double achieved_rate = 0.0;    ///< r_i(t), bit/s, zero unless scheduled and delivered
    double avg_rate = 0.0;         ///< R_i(t), bit/s
    std::int64_t last_scheduled = -1;  ///< TTI index of the last allocation, -1 if never
};

/// Throws std::invalid_argument when BET/PF see a negative or non-finite R.
/// R == 0 (reachable with alpha == 1) maps to +inf priority.
double priority(const SchedulerKind& kind, const UeSchedState& state);

/// Argmax of priority. Exact ties go to the least-recently-scheduled UE, then
/// to the lowest ue_id. Throws std::invalid_argument on an empty list.
UeId select_ue(const SchedulerKind& kind, std::span<const UeSchedState> states);

/// R(t) = (1 - alpha) R(t-1) + alpha r(t)
double update_avg(double avg_prev, double achieved, double alpha);

/// One TTI of the downlink shared channel.
struct TtiRecord {
    std::int64_t t = 0;
    std::optional<UeId> ue_id;  ///< empty when no UE had CQI >= 1
    int cqi = 0;
    std::optional<int> mcs_index;
    std::int64_t tbs = 0;
    bool error = false;
    std::int64_t delivered_bits = 0;
};

/// Called once for the scheduled UE (index into `states`); returns true on block error.
using ErrorDraw = std::function<bool(std::size_t index, const linkadapt::McsDecision&)>;

/// Refreshes d_i from `decisions`, picks one UE among those with a non-empty
/// transport block, sets its r from the block outcome, zeroes r for everyone
/// else, then applies update_avg to every UE.
TtiRecord run_tti(const SchedulerKind& kind, std::span<UeSchedState> states,
                  std::span<const linkadapt::McsDecision> decisions, const ErrorDraw& draw_error,
                  std::int64_t t, double tti_s);

}  // namespace mcsim::sched
