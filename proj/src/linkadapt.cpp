#include "mcsim/linkadapt.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mcsim::linkadapt {

namespace {

struct StandardRow {
    int modulation_order;
    int rate_x1024;
    int mcs_index;
};

// CQI 1..15. Code rates are x/1024; MCS indices point into the companion MCS table.
constexpr std::array<StandardRow, 15> kTable1{{
    {2, 78, 0},   {2, 120, 0},  {2, 193, 2},  {2, 308, 4},  {2, 449, 6},
    {2, 602, 8},  {4, 378, 11}, {4, 490, 13}, {4, 616, 15}, {6, 466, 18},
    {6, 567, 20}, {6, 666, 22}, {6, 772, 24}, {6, 873, 26}, {6, 948, 28},
}};

constexpr std::array<StandardRow, 15> kTable2{{
    {2, 78, 0},   {2, 193, 1},  {2, 449, 3},  {4, 378, 5},  {4, 490, 7},
    {4, 616, 9},  {6, 466, 11}, {6, 567, 13}, {6, 666, 15}, {6, 772, 17},
    {6, 873, 19}, {8, 711, 21}, {8, 797, 23}, {8, 885, 25}, {8, 948, 27},
}};

constexpr std::array<StandardRow, 15> kTable3{{
    {2, 30, 0},   {2, 50, 2},   {2, 78, 4},   {2, 120, 6},  {2, 193, 8},
    {2, 308, 10}, {2, 449, 12}, {2, 602, 14}, {4, 378, 16}, {4, 490, 18},
    {4, 616, 20}, {6, 466, 22}, {6, 567, 24}, {6, 666, 26}, {6, 772, 28},
}};

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(CqiTableId id)
{
    switch (id) {
    case CqiTableId::Table1: return "table1";
    case CqiTableId::Table2: return "table2";
    case CqiTableId::Table3: return "table3";
    }
    return "unknown";
}

CqiTableId parse_cqi_table_id(std::string_view name)
{
    if (name == "table1") return CqiTableId::Table1;
    if (name == "table2") return CqiTableId::Table2;
    if (name == "table3") return CqiTableId::Table3;
    throw std::invalid_argument("unknown CQI table '" + std::string(name) + "'");
}

double shannon_gap_threshold_db(double spectral_efficiency, double gap_db)
{
    const double gap = std::pow(10.0, gap_db / 10.0);
    return 10.0 * std::log10((std::exp2(spectral_efficiency) - 1.0) * gap);
}

CqiTable::CqiTable(std::vector<CqiEntry> entries, double target_bler)
    : entries_(std::move(entries)), target_bler_(target_bler)
{
    if (target_bler_ != 0.1 && target_bler_ != 0.00001) {
        throw std::invalid_argument("target BLER must be 0.1 or 0.00001");
    }
    if (entries_.size() != 16) {
        throw std::invalid_argument("CQI table must have exactly 16 entries");
    }
    if (entries_[0].cqi != 0 || entries_[0].sinr_threshold_db || entries_[0].mcs_index) {
        throw std::invalid_argument("CQI 0 must be the out-of-range entry");
    }
    for (std::size_t k = 1; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.cqi != static_cast<int>(k)) {
            throw std::invalid_argument("CQI entries must be numbered 0..15 in order");
        }
        const int m = e.modulation_order;
        if (m != 2 && m != 4 && m != 6 && m != 8) {
            throw std::invalid_argument("modulation order must be 2, 4, 6 or 8");
        }
        if (!(e.code_rate > 0.0 && e.code_rate < 1.0)) {
            throw std::invalid_argument("code rate must be in (0, 1)");
        }
        if (!e.sinr_threshold_db || !std::isfinite(*e.sinr_threshold_db)) {
            throw std::invalid_argument("CQI " + std::to_string(k) + " needs a finite SINR threshold");
        }
        if (!e.mcs_index) {
            throw std::invalid_argument("CQI " + std::to_string(k) + " needs an MCS index");
        }
        if (k >= 2 && !(*e.sinr_threshold_db > *entries_[k - 1].sinr_threshold_db)) {
            throw std::invalid_argument("SINR thresholds must be strictly increasing in CQI");
        }
    }
}

CqiTable CqiTable::standard(CqiTableId id, double gap_db)
{
    const std::array<StandardRow, 15>* rows = &kTable1;
    double target = 0.1;
    switch (id) {
    case CqiTableId::Table1: rows = &kTable1; break;
    case CqiTableId::Table2: rows = &kTable2; break;
    case CqiTableId::Table3: rows = &kTable3; target = 0.00001; break;
    }
    std::vector<CqiEntry> entries;
    entries.reserve(16);
    entries.push_back(CqiEntry{});
    for (std::size_t i = 0; i < rows->size(); ++i) {
        const auto& row = (*rows)[i];
        CqiEntry e;
        e.cqi = static_cast<int>(i) + 1;
        e.modulation_order = row.modulation_order;
        e.code_rate = row.rate_x1024 / 1024.0;
        e.sinr_threshold_db = shannon_gap_threshold_db(e.spectral_efficiency(), gap_db);
        e.mcs_index = row.mcs_index;
        entries.push_back(e);
    }
    return CqiTable(std::move(entries), target);
}

const CqiEntry& CqiTable::entry(int cqi) const
{
    if (cqi < 0 || cqi > 15) {
        throw std::out_of_range("CQI must be in 0..15");
    }
    return entries_[static_cast<std::size_t>(cqi)];
}

CqiTable CqiTable::with_thresholds(const std::map<int, double>& thresholds_db) const
{
    auto entries = entries_;
    for (const auto& [cqi, th] : thresholds_db) {
        if (cqi < 1 || cqi > 15) {
            throw std::invalid_argument("threshold override for CQI " + std::to_string(cqi) +
                                        " is outside 1..15");
        }
        entries[static_cast<std::size_t>(cqi)].sinr_threshold_db = th;
    }
    return CqiTable(std::move(entries), target_bler_);
}

std::map<int, double> load_threshold_overrides(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open threshold file '" + path.string() + "'");
    }
    std::map<int, double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (tab == std::string::npos) {
            throw std::runtime_error(where + ": expected 'k<TAB>sinr_threshold_dB'");
        }
        try {
            std::size_t used = 0;
            const std::string k_text = trim(line.substr(0, tab));
            const std::string v_text = trim(line.substr(tab + 1));
            const int k = std::stoi(k_text, &used);
            if (used != k_text.size()) throw std::invalid_argument("cqi");
            const double v = std::stod(v_text, &used);
            if (used != v_text.size()) throw std::invalid_argument("threshold");
            if (k < 1 || k > 15) {
                throw std::runtime_error(where + ": CQI " + std::to_string(k) + " is outside 1..15");
            }
            if (!out.emplace(k, v).second) {
                throw std::runtime_error(where + ": duplicate CQI " + std::to_string(k));
            }
        } catch (const std::logic_error&) {
            throw std::runtime_error(where + ": unparseable line '" + line + "'");
        }
    }
    return out;
}

int cqi_from_sinr(double sinr_db, const CqiTable& table)
{
    int best = 0;
    for (const auto& e : table.entries().subspan(1)) {
        if (*e.sinr_threshold_db <= sinr_db) {
            best = e.cqi;
        } else {
            break;
        }
    }
    return best;
}

McsDecision mcs_from_cqi(int cqi, const CqiTable& table)
{
    McsDecision d;
    d.cqi = cqi;
    d.mcs_index = table.entry(cqi).mcs_index;
    return d;
}

std::int64_t tbs(const CqiEntry& entry, int n_prb, int re_per_prb)
{
    if (n_prb < 1 || re_per_prb < 1) {
        throw std::invalid_argument("tbs needs n_prb >= 1 and re_per_prb >= 1");
    }
    const double bits = static_cast<double>(n_prb) * re_per_prb * entry.modulation_order * entry.code_rate;
    return static_cast<std::int64_t>(std::floor(bits));
}

double bler(double sinr_db, const CqiEntry& entry, const CqiTable& table, double slope_db)
{
    if (!entry.sinr_threshold_db) {
        throw std::invalid_argument("BLER is undefined for the out-of-range CQI");
    }
    if (!(slope_db > 0.0)) {
        throw std::invalid_argument("BLER slope must be > 0");
    }
    const double k = 1.0 / table.target_bler() - 1.0;
    const double x = (sinr_db - *entry.sinr_threshold_db) / slope_db;
    return 1.0 / (1.0 + k * std::exp(x));
}

double achievable_rate(const McsDecision& decision, double tti_s)
{
    if (!(tti_s > 0.0)) {
        throw std::invalid_argument("TTI must be > 0");
    }
    return static_cast<double>(decision.tbs) / tti_s;
}

McsDecision select_mcs(double sinr_db, const CqiTable& table, const ResourceGrid& grid, double slope_db)
{
    McsDecision d = mcs_from_cqi(cqi_from_sinr(sinr_db, table), table);
    if (d.cqi == 0) {
        return d;
    }
    const auto& e = table.entry(d.cqi);
    d.tbs = tbs(e, grid.n_prb, grid.re_per_prb);
    d.expected_bler = bler(sinr_db, e, table, slope_db);
    return d;
}

}  // namespace mcsim::linkadapt
