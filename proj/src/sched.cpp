#include "mcsim/sched.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsim::sched {

std::string_view to_string(Policy p)
{
    switch (p) {
    case Policy::MaxThroughput: return "mt";
    case Policy::BlindEqualThroughput: return "bet";
    case Policy::ProportionalFair: return "pf";
    }
    return "unknown";
}

Policy parse_policy(std::string_view name)
{
    if (name == "mt") return Policy::MaxThroughput;
    if (name == "bet") return Policy::BlindEqualThroughput;
    if (name == "pf") return Policy::ProportionalFair;
    throw std::invalid_argument("unknown scheduler '" + std::string(name) + "'");
}

SchedulerKind SchedulerKind::with_window(Policy policy, double window_ttis)
{
    if (!(window_ttis >= 1.0)) {
        throw std::invalid_argument("averaging window must be >= 1 TTI");
    }
    return SchedulerKind{policy, 1.0 / window_ttis};
}

void SchedulerKind::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must be in (0, 1]");
    }
}

namespace {

void require_valid_avg(const UeSchedState& s)
{
    if (!(s.avg_rate >= 0.0) || !std::isfinite(s.avg_rate)) {
        throw std::invalid_argument("UE " + std::to_string(s.ue_id) +
                                    ": average throughput must be finite and non-negative");
    }
}

// Returns true when `a` should be preferred over `b`.
bool preferred(const SchedulerKind& kind, const UeSchedState& a, const UeSchedState& b)
{
    if (kind.policy == Policy::BlindEqualThroughput) {
        // Lowest R wins; comparing R directly avoids rounding in 1/R.
        if (a.avg_rate != b.avg_rate) {
            return a.avg_rate < b.avg_rate;
        }
    } else {
        const double pa = priority(kind, a);
        const double pb = priority(kind, b);
        if (pa != pb) {
            return pa > pb;
        }
    }
    if (a.last_scheduled != b.last_scheduled) {
        return a.last_scheduled < b.last_scheduled;
    }
    return a.ue_id < b.ue_id;
}

}  // namespace

double priority(const SchedulerKind& kind, const UeSchedState& state)
{
    switch (kind.policy) {
    case Policy::MaxThroughput:
        return state.achievable_rate;
    case Policy::BlindEqualThroughput:
        require_valid_avg(state);
        return state.avg_rate > 0.0 ? 1.0 / state.avg_rate : std::numeric_limits<double>::infinity();
    case Policy::ProportionalFair:
        require_valid_avg(state);
        if (state.avg_rate > 0.0) {
            return state.achievable_rate / state.avg_rate;
        }
        return state.achievable_rate > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return 0.0;
}

UeId select_ue(const SchedulerKind& kind, std::span<const UeSchedState> states)
{
    if (states.empty()) {
        throw std::invalid_argument("select_ue needs at least one UE");
    }
    const UeSchedState* best = &states.front();
    for (const auto& s : states.subspan(1)) {
        if (preferred(kind, s, *best)) {
            best = &s;
        }
    }
    // Validate every R even when the first candidate wins outright.
    if (kind.policy != Policy::MaxThroughput) {
        for (const auto& s : states) {
            require_valid_avg(s);
        }
    }
    return best->ue_id;
}

double update_avg(double avg_prev, double achieved, double alpha)
{
    return (1.0 - alpha) * avg_prev + alpha * achieved;
}

TtiRecord run_tti(const SchedulerKind& kind, std::span<UeSchedState> states,
                  std::span<const linkadapt::McsDecision> decisions, const ErrorDraw& draw_error,
                  std::int64_t t, double tti_s)
{
    if (states.size() != decisions.size()) {
        throw std::invalid_argument("run_tti needs one decision per UE");
    }
    std::vector<UeSchedState> candidates;
    candidates.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        states[i].achievable_rate = linkadapt::achievable_rate(decisions[i], tti_s);
        states[i].achieved_rate = 0.0;
        if (decisions[i].tbs > 0) {
            candidates.push_back(states[i]);
        }
    }

    TtiRecord rec;
    rec.t = t;
    if (!candidates.empty()) {
        const UeId chosen = select_ue(kind, candidates);
        std::size_t idx = 0;
        while (states[idx].ue_id != chosen) {
            ++idx;
        }
        const auto& dec = decisions[idx];
        rec.ue_id = chosen;
        rec.cqi = dec.cqi;
        rec.mcs_index = dec.mcs_index;
        rec.tbs = dec.tbs;
        rec.error = draw_error ? draw_error(idx, dec) : false;
        rec.delivered_bits = rec.error ? 0 : dec.tbs;
        states[idx].achieved_rate = static_cast<double>(rec.delivered_bits) / tti_s;
        states[idx].last_scheduled = t;
    }
    for (auto& s : states) {
        s.avg_rate = update_avg(s.avg_rate, s.achieved_rate, kind.alpha);
    }
    return rec;
}

}  // namespace mcsim::sched
