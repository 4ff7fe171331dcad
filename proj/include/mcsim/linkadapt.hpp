#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mcsim::linkadapt {

/// One row of a CQI table. CQI 0 is the out-of-range row: it carries no
/// modulation, no code rate and no SINR threshold.
struct CqiEntry {
    int cqi = 0;
    int modulation_order = 0;            ///< bits per symbol
    double code_rate = 0.0;              ///< fraction, x/1024 in the standard tables
    std::optional<double> sinr_threshold_db;
    std::optional<int> mcs_index;        ///< MCS-table row with the same modulation and rate

    double spectral_efficiency() const { return modulation_order * code_rate; }
};

enum class CqiTableId {
    Table1,  ///< up to 64QAM, target BLER 0.1
    Table2,  ///< up to 256QAM, target BLER 0.1
    Table3,  ///< up to 64QAM, target BLER 1e-5
};

std::string_view to_string(CqiTableId id);
CqiTableId parse_cqi_table_id(std::string_view name);

inline constexpr double kDefaultGapDb = 10.0;
inline constexpr double kDefaultBlerSlopeDb = 0.5;
inline constexpr int kDefaultRePerPrb = 144;

/// SINR needed by a code of the given spectral efficiency under a Shannon gap:
/// 10 log10((2^eff - 1) * gap).
double shannon_gap_threshold_db(double spectral_efficiency, double gap_db);

class CqiTable {
public:
    /// Validates the 16-entry layout and monotone thresholds; throws std::invalid_argument.
    CqiTable(std::vector<CqiEntry> entries, double target_bler);

    /// One of the standard tables with thresholds derived from `gap_db`.
    static CqiTable standard(CqiTableId id, double gap_db = kDefaultGapDb);

    const CqiEntry& entry(int cqi) const;
    std::span<const CqiEntry> entries() const { return entries_; }
    double target_bler() const { return target_bler_; }

    /// Copy with selected thresholds replaced (keys are CQI 1..15).
    CqiTable with_thresholds(const std::map<int, double>& thresholds_db) const;

private:
    std::vector<CqiEntry> entries_;
    double target_bler_;
};

/// Parses `k<TAB>sinr_threshold_dB` lines. Errors carry the line number.
std::map<int, double> load_threshold_overrides(const std::filesystem::path& path);

/// Per-TTI link-adaptation decision. `mcs_index` is empty for "no transmission".
struct McsDecision {
    int cqi = 0;
    std::optional<int> mcs_index;
    std::int64_t tbs = 0;
    double expected_bler = 0.0;
};

/// Highest CQI whose threshold is <= sinr (inclusive lower bound); 0 below CQI 1.
int cqi_from_sinr(double sinr_db, const CqiTable& table);

/// Index mapping only; tbs and expected_bler are left at zero.
McsDecision mcs_from_cqi(int cqi, const CqiTable& table);

/// floor(n_prb * re_per_prb * modulation_order * code_rate)
std::int64_t tbs(const CqiEntry& entry, int n_prb, int re_per_prb);

/// Logistic block-error curve in dB, anchored so bler(threshold) == target BLER:
/// bler(s) = 1 / (1 + K exp((s - s_th) / slope)),  K = 1/target - 1.
double bler(double sinr_db, const CqiEntry& entry, const CqiTable& table,
            double slope_db = kDefaultBlerSlopeDb);

double achievable_rate(const McsDecision& decision, double tti_s);

struct ResourceGrid {
    int n_prb = 51;
    int re_per_prb = kDefaultRePerPrb;
};

/// Full chain sinr -> cqi -> mcs -> tbs, with the expected BLER at `sinr_db`.
McsDecision select_mcs(double sinr_db, const CqiTable& table, const ResourceGrid& grid,
                       double slope_db = kDefaultBlerSlopeDb);

}  // namespace mcsim::linkadapt
