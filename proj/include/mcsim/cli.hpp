#pragma once

#include "mcsim/config.hpp"
#include "mcsim/sim.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mcsim::cli {

enum class Command { Run, Compare, Sweep };

struct CliConfig {
    Command command = Command::Run;
    std::filesystem::path config_path;
    std::filesystem::path output_dir = ".";
    std::vector<std::string> overrides;  ///< KEY=VALUE from --set
    bool trace = false;
    std::optional<std::filesystem::path> headers_path;
    std::optional<std::filesystem::path> latencies_path;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
};

/// Loads the scenario named by `cli`, including header/latency override files.
sim::ScenarioConfig load_scenario(const CliConfig& cli);

/// Runs the scenario and writes results.csv (and trace.csv). Returns the exit status.
int cmd_run(const sim::ScenarioConfig& cfg, const std::filesystem::path& output_dir, bool trace,
            std::ostream& out, std::ostream& err);

/// Builds the three architectures and writes comparison.csv.
int cmd_compare(const std::filesystem::path& output_dir, const std::optional<std::filesystem::path>& headers_path,
                const std::optional<std::filesystem::path>& latencies_path, std::ostream& out, std::ostream& err);

/// One scenario per value of `key`; writes sweep_<key>.csv.
int cmd_sweep(const CliConfig& cli, std::ostream& out, std::ostream& err);

/// Dispatches on cli.command, turning exceptions into a message and exit status 1.
int execute(const CliConfig& cli, std::ostream& out, std::ostream& err);

}  // namespace mcsim::cli
