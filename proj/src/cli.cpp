#include "mcsim/cli.hpp"

#include "mcsim/csv.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mcsim::cli {

namespace fs = std::filesystem;

namespace {

void apply_arch_files(const CliConfig& cli, sim::ScenarioConfig& cfg)
{
    if (cli.headers_path) {
        cfg.headers = arch::load_header_table(*cli.headers_path, cfg.headers);
    }
    if (cli.latencies_path) {
        arch::load_latency_file(*cli.latencies_path, cfg.latencies, cfg.processing);
    }
}

config::Settings load_settings(const CliConfig& cli)
{
    auto settings = config::Settings::from_file(cli.config_path);
    for (const auto& o : cli.overrides) {
        settings.apply_override(o);
    }
    return settings;
}

// Writes `content` to dir/name only after the whole file is rendered.
void write_file(const fs::path& dir, const std::string& name, const std::string& content)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    f << content;
    f.flush();
    if (!f) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

void print_summary(std::ostream& out, const sim::ScenarioResult& result, const sim::ScenarioConfig& cfg)
{
    out << "arch " << arch::to_string(cfg.arch_kind) << ", scheduler " << sched::to_string(cfg.scheduler.policy)
        << " (alpha " << cfg.scheduler.alpha << "), scenario " << sim::to_string(cfg.mode) << ", CP RTT "
        << result.attachment.rtt_s * 1000.0 << " ms / CRT " << result.attachment.crt_limit_s * 1000.0 << " ms: "
        << (result.attachment.success ? "attached" : "ATTACH FAILED") << '\n';
    out << std::setw(4) << "pos" << std::setw(4) << "ue" << std::setw(10) << "dist_m" << std::setw(10)
        << "rsrp_dBm" << std::setw(9) << "sinr_dB" << std::setw(6) << "cqi" << std::setw(12) << "thr_Mbps"
        << std::setw(8) << "share" << '\n';
    const auto flags = out.flags();
    out << std::fixed;
    for (const auto& r : result.rows) {
        out << std::setw(4) << r.position_index << std::setw(4) << r.ue_id << std::setw(10) << std::setprecision(1)
            << r.distance_m << std::setw(10) << std::setprecision(2) << r.rsrp_dbm << std::setw(9) << r.sinr_db
            << std::setw(6) << std::setprecision(1) << r.mean_cqi << std::setw(12) << std::setprecision(3)
            << r.throughput_bps / 1e6 << std::setw(8) << r.tti_share << '\n';
    }
    out.flags(flags);
}

}  // namespace

sim::ScenarioConfig load_scenario(const CliConfig& cli)
{
    auto cfg = config::build(load_settings(cli));
    apply_arch_files(cli, cfg);
    return cfg;
}

int cmd_run(const sim::ScenarioConfig& cfg, const fs::path& output_dir, bool trace, std::ostream& out,
            std::ostream& err)
{
    try {
        const auto result = sim::run_scenario(cfg, {.trace = trace, .parallel = true});
        std::ostringstream results;
        sim::write_results_csv(results, result.rows);
        std::string trace_text;
        if (trace) {
            std::ostringstream t;
            sim::write_trace_csv(t, result.trace);
            trace_text = t.str();
        }
        write_file(output_dir, "results.csv", results.str());
        if (trace) {
            write_file(output_dir, "trace.csv", trace_text);
        }
        print_summary(out, result, cfg);
        return 0;
    } catch (const std::exception& e) {
        err << "mcsim run: " << e.what() << '\n';
        return 1;
    }
}

int cmd_compare(const fs::path& output_dir, const std::optional<fs::path>& headers_path,
                const std::optional<fs::path>& latencies_path, std::ostream& out, std::ostream& err)
{
    try {
        arch::HeaderTable headers;
        arch::LatencyConfig latencies;
        arch::ProcessingDelays processing;
        if (headers_path) {
            headers = arch::load_header_table(*headers_path);
        }
        if (latencies_path) {
            arch::load_latency_file(*latencies_path, latencies, processing);
        }
        std::vector<arch::ArchModel> models;
        for (const auto kind : {arch::ArchKind::MobileGnb, arch::ArchKind::GnbDuRelay, arch::ArchKind::IabNode}) {
            models.push_back(arch::build_arch(kind, latencies, headers));
        }
        const auto rows = arch::compare_table(models, processing);
        std::ostringstream csv_text;
        arch::write_comparison_csv(csv_text, rows);
        write_file(output_dir, "comparison.csv", csv_text.str());

        out << csv_text.str();
        for (const auto& m : models) {
            const auto attach = arch::crt_check(m, arch::kMaxContentionResolutionTimer, processing);
            out << arch::to_string(m.kind) << ": CRT " << (attach.success ? "ok" : "EXPIRES") << " (RTT "
                << attach.rtt_s * 1000.0 << " ms to " << m.rrc_terminator << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "mcsim compare: " << e.what() << '\n';
        return 1;
    }
}

int cmd_sweep(const CliConfig& cli, std::ostream& out, std::ostream& err)
{
    try {
        if (!config::is_known_key(cli.sweep_key)) {
            throw config::ConfigError("sweep: unknown key '" + cli.sweep_key + "'");
        }
        if (cli.sweep_values.empty()) {
            throw config::ConfigError("sweep: no values given for key '" + cli.sweep_key + "'");
        }
        const auto base = load_settings(cli);
        std::ostringstream text;
        text << "value," << sim::kResultsCsvHeader << '\n';
        for (const auto& value : cli.sweep_values) {
            auto settings = base;
            settings.set(cli.sweep_key, value, "sweep " + cli.sweep_key + "=" + value);
            auto cfg = config::build(settings);
            apply_arch_files(cli, cfg);
            const auto result = sim::run_scenario(cfg);
            for (const auto& row : result.rows) {
                text << csv::field(value) << ',' << sim::format_result_row(row) << '\n';
            }
            out << cli.sweep_key << " = " << value << ": " << result.rows.size() << " rows"
                << (result.attachment.success ? "" : " (attach failed)") << '\n';
        }
        write_file(cli.output_dir, "sweep_" + cli.sweep_key + ".csv", text.str());
        return 0;
    } catch (const std::exception& e) {
        err << "mcsim sweep: " << e.what() << '\n';
        return 1;
    }
}

int execute(const CliConfig& cli, std::ostream& out, std::ostream& err)
{
    switch (cli.command) {
    case Command::Run: {
        sim::ScenarioConfig cfg;
        try {
            cfg = load_scenario(cli);
        } catch (const std::exception& e) {
            err << "mcsim run: " << e.what() << '\n';
            return 1;
        }
        return cmd_run(cfg, cli.output_dir, cli.trace, out, err);
    }
    case Command::Compare:
        return cmd_compare(cli.output_dir, cli.headers_path, cli.latencies_path, out, err);
    case Command::Sweep:
        return cmd_sweep(cli, out, err);
    }
    return 1;
}

}  // namespace mcsim::cli
