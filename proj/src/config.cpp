#include "mcsim/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace mcsim::config {

namespace {

constexpr std::array kKeys = {
    "arch",          "scheduler",     "alpha",         "window",       "tx_power_dbm",
    "noise_dbm",     "carrier_ghz",   "bandwidth_mhz", "scs_khz",      "n_prb",
    "tti_ms",        "positions_n",   "path_start",    "path_end",     "on_gnb_pos",
    "n_ues",         "ttis_per_position", "seed",      "scenario",     "max_retx",
    "gap_db",        "crt_ms",        "cqi_table",     "cqi_thresholds", "re_per_prb",
    "bler",          "bler_slope_db", "backhaul",
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// ue<i>_pos with i >= 1; returns i or nullopt.
std::optional<int> ue_pos_index(std::string_view key)
{
    if (!key.starts_with("ue") || !key.ends_with("_pos") || key.size() <= 6) {
        return std::nullopt;
    }
    const auto digits = key.substr(2, key.size() - 6);
    int i = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || i < 1 || digits.front() == '0') {
        return std::nullopt;
    }
    return i;
}

double parse_double(std::string_view text)
{
    const std::string s = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view text)
{
    const std::string s = trim(text);
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
}

int parse_small_int(std::string_view text)
{
    const auto v = parse_int(text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("integer out of range");
    }
    return static_cast<int>(v);
}

}  // namespace

bool is_known_key(std::string_view key)
{
    for (const auto* k : kKeys) {
        if (key == k) {
            return true;
        }
    }
    return ue_pos_index(key).has_value();
}

channel::Position parse_position(std::string_view text)
{
    std::array<double, 3> v{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto comma = text.find(',', start);
        const bool last = i == 2;
        if (last != (comma == std::string_view::npos)) {
            throw std::invalid_argument("expected 'x,y,h', got '" + std::string(text) + "'");
        }
        v[i] = parse_double(text.substr(start, last ? std::string_view::npos : comma - start));
        start = comma + 1;
    }
    channel::Position p{v[0], v[1], v[2]};
    channel::validate(p);
    return p;
}

Settings Settings::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    Settings s;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const std::string origin = path.string() + ":" + std::to_string(line_no);
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!is_known_key(key)) {
            throw ConfigError(origin + ": unknown key '" + key + "'");
        }
        s.set(std::move(key), std::move(value), origin);
    }
    return s;
}

void Settings::apply_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("--set " + std::string(assignment) + ": expected KEY=VALUE");
    }
    std::string key = trim(assignment.substr(0, eq));
    if (!is_known_key(key)) {
        throw ConfigError("--set " + std::string(assignment) + ": unknown key '" + key + "'");
    }
    set(key, trim(assignment.substr(eq + 1)), "--set " + key);
}

void Settings::set(std::string key, std::string text, std::string origin)
{
    values_[std::move(key)] = Value{std::move(text), std::move(origin)};
}

sim::ScenarioConfig build(const Settings& settings)
{
    auto cfg = sim::ScenarioConfig::defaults();
    const auto& vals = settings.values();

    const auto fail = [](const Settings::Value& v, const std::string& key, const std::string& why) -> ConfigError {
        return ConfigError(v.origin + ": key '" + key + "': " + why);
    };

    // Applies `fn` to the value of `key` when present, wrapping parse errors.
    const auto with = [&](const std::string& key, auto&& fn) {
        const auto it = vals.find(key);
        if (it == vals.end()) {
            return;
        }
        try {
            fn(it->second.text);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(it->second, key, e.what());
        }
    };

    for (const auto& [key, v] : vals) {
        if (!is_known_key(key)) {
            throw fail(v, key, "unknown key");
        }
    }

    with("arch", [&](const std::string& t) { cfg.arch_kind = arch::parse_arch_kind(t); });
    with("scheduler", [&](const std::string& t) { cfg.scheduler.policy = sched::parse_policy(t); });
    if (vals.contains("alpha") && vals.contains("window")) {
        throw fail(vals.at("window"), "window", "cannot be combined with 'alpha'");
    }
    with("alpha", [&](const std::string& t) {
        cfg.scheduler.alpha = parse_double(t);
        cfg.scheduler.validate();
    });
    with("window", [&](const std::string& t) {
        cfg.scheduler = sched::SchedulerKind::with_window(cfg.scheduler.policy, parse_double(t));
    });

    with("tx_power_dbm", [&](const std::string& t) { cfg.radio.tx_power_dbm = parse_double(t); });
    with("noise_dbm", [&](const std::string& t) { cfg.radio.noise_floor_dbm = parse_double(t); });
    with("carrier_ghz", [&](const std::string& t) {
        const double ghz = parse_double(t);
        if (!(ghz >= 0.5 && ghz <= 100.0)) throw std::invalid_argument("must be in [0.5, 100]");
        cfg.radio.carrier_freq_hz = ghz * 1e9;
    });
    with("bandwidth_mhz", [&](const std::string& t) {
        const double mhz = parse_double(t);
        if (!(mhz > 0.0)) throw std::invalid_argument("must be > 0");
        cfg.radio.bandwidth_hz = mhz * 1e6;
    });
    with("scs_khz", [&](const std::string& t) {
        const double khz = parse_double(t);
        if (khz != 15.0 && khz != 30.0 && khz != 60.0 && khz != 120.0) {
            throw std::invalid_argument("must be one of 15, 30, 60, 120");
        }
        cfg.radio.subcarrier_spacing_hz = khz * 1e3;
    });
    with("n_prb", [&](const std::string& t) {
        cfg.radio.n_prb = parse_small_int(t);
        if (cfg.radio.n_prb < 1) throw std::invalid_argument("must be >= 1");
    });
    with("tti_ms", [&](const std::string& t) {
        const double ms = parse_double(t);
        if (!(ms > 0.0)) throw std::invalid_argument("must be > 0");
        cfg.tti_duration_s = ms / 1000.0;
    });

    auto path_start = channel::Position{1000.0, 25.0, 15.0};
    auto path_end = channel::Position{1990.0, 1225.0, 15.0};
    int positions_n = 21;
    with("path_start", [&](const std::string& t) { path_start = parse_position(t); });
    with("path_end", [&](const std::string& t) { path_end = parse_position(t); });
    with("positions_n", [&](const std::string& t) {
        positions_n = parse_small_int(t);
        if (positions_n < 2) throw std::invalid_argument("must be >= 2");
    });
    cfg.positions = sim::mc_positions(path_start, path_end, positions_n);
    with("on_gnb_pos", [&](const std::string& t) { cfg.on_gnb_position = parse_position(t); });

    std::size_t n_ues = cfg.ue_positions.size();
    with("n_ues", [&](const std::string& t) {
        const int n = parse_small_int(t);
        if (n < 1) throw std::invalid_argument("must be >= 1");
        n_ues = static_cast<std::size_t>(n);
    });
    for (const auto& [key, v] : vals) {
        if (const auto i = ue_pos_index(key); i && static_cast<std::size_t>(*i) > n_ues) {
            if (!vals.contains("n_ues")) {
                n_ues = static_cast<std::size_t>(*i);
            } else {
                throw fail(v, key, "index exceeds n_ues");
            }
        }
    }
    std::vector<std::optional<channel::Position>> ues(n_ues);
    for (std::size_t i = 0; i < n_ues && i < cfg.ue_positions.size(); ++i) {
        ues[i] = cfg.ue_positions[i];
    }
    for (std::size_t i = 0; i < n_ues; ++i) {
        const std::string key = "ue" + std::to_string(i + 1) + "_pos";
        with(key, [&](const std::string& t) { ues[i] = parse_position(t); });
        if (!ues[i]) {
            throw ConfigError("config: key '" + key + "': required when n_ues >= " + std::to_string(i + 1));
        }
    }
    cfg.ue_positions.clear();
    for (const auto& p : ues) {
        cfg.ue_positions.push_back(*p);
    }

    with("ttis_per_position", [&](const std::string& t) {
        cfg.ttis_per_position = parse_small_int(t);
        if (cfg.ttis_per_position < 1) throw std::invalid_argument("must be >= 1");
    });
    with("seed", [&](const std::string& t) {
        const auto v = parse_int(t);
        if (v < 0) throw std::invalid_argument("must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(v);
    });
    with("scenario", [&](const std::string& t) {
        if (t == "single") cfg.mode = sim::ScenarioMode::SingleUe;
        else if (t == "all") cfg.mode = sim::ScenarioMode::AllUes;
        else throw std::invalid_argument("expected 'single' or 'all', got '" + t + "'");
    });
    with("max_retx", [&](const std::string& t) {
        cfg.max_retx = parse_small_int(t);
        if (cfg.max_retx < 0) throw std::invalid_argument("must be >= 0");
    });
    with("crt_ms", [&](const std::string& t) {
        const double ms = parse_double(t);
        if (!(ms > 0.0)) throw std::invalid_argument("must be > 0");
        cfg.crt_limit_s = ms / 1000.0;
    });

    auto table_id = linkadapt::CqiTableId::Table1;
    double gap_db = linkadapt::kDefaultGapDb;
    with("cqi_table", [&](const std::string& t) { table_id = linkadapt::parse_cqi_table_id(t); });
    with("gap_db", [&](const std::string& t) { gap_db = parse_double(t); });
    cfg.cqi_table = linkadapt::CqiTable::standard(table_id, gap_db);
    with("cqi_thresholds", [&](const std::string& t) {
        cfg.cqi_table = cfg.cqi_table.with_thresholds(linkadapt::load_threshold_overrides(t));
    });
    with("re_per_prb", [&](const std::string& t) {
        cfg.re_per_prb = parse_small_int(t);
        if (cfg.re_per_prb < 1) throw std::invalid_argument("must be >= 1");
    });
    with("bler", [&](const std::string& t) {
        if (t == "stochastic") cfg.bler_mode = sim::BlerMode::Stochastic;
        else if (t == "deterministic") cfg.bler_mode = sim::BlerMode::Deterministic;
        else if (t == "off") cfg.bler_mode = sim::BlerMode::Off;
        else throw std::invalid_argument("expected 'stochastic', 'deterministic' or 'off', got '" + t + "'");
    });
    with("bler_slope_db", [&](const std::string& t) {
        cfg.bler_slope_db = parse_double(t);
        if (!(cfg.bler_slope_db > 0.0)) throw std::invalid_argument("must be > 0");
    });
    with("backhaul", [&](const std::string& t) {
        if (t == "capped") cfg.backhaul_mode = sim::BackhaulMode::Capped;
        else if (t == "unlimited") cfg.backhaul_mode = sim::BackhaulMode::Unlimited;
        else throw std::invalid_argument("expected 'capped' or 'unlimited', got '" + t + "'");
    });

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

sim::ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    auto settings = Settings::from_file(path);
    for (const auto& o : overrides) {
        settings.apply_override(o);
    }
    return build(settings);
}

}  // namespace mcsim::config
