#include "mcsim/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Mobile cell downlink simulator"};
    app.require_subcommand(1);

    mcsim::cli::CliConfig cli;
    std::string config_path;
    std::string out_dir = ".";
    std::string headers_path;
    std::string latencies_path;

    const auto add_arch_files = [&](CLI::App* cmd) {
        cmd->add_option("--headers", headers_path, "Header-size override file (LAYER<TAB>bytes)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--latencies", latencies_path, "Latency override file (KEY<TAB>ms)")
            ->check(CLI::ExistingFile);
    };

    auto* run = app.add_subcommand("run", "Run the position sweep scenario");
    run->add_option("--config", config_path, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--set", cli.overrides, "Override a config key (KEY=VALUE), repeatable");
    run->add_flag("--trace", cli.trace, "Also write trace.csv");
    add_arch_files(run);

    auto* compare = app.add_subcommand("compare", "Compare the three mobile cell architectures");
    compare->add_option("--out", out_dir, "Output directory");
    add_arch_files(compare);

    auto* sweep = app.add_subcommand("sweep", "Run the scenario once per value of one key");
    sweep->add_option("--config", config_path, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--set", cli.overrides, "Override a config key (KEY=VALUE), repeatable");
    sweep->add_option("key", cli.sweep_key, "Config key to sweep")->required();
    sweep->add_option("values", cli.sweep_values, "Values to try");
    add_arch_files(sweep);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        cli.command = mcsim::cli::Command::Run;
    } else if (compare->parsed()) {
        cli.command = mcsim::cli::Command::Compare;
    } else {
        cli.command = mcsim::cli::Command::Sweep;
    }
    cli.config_path = config_path;
    cli.output_dir = out_dir;
    if (!headers_path.empty()) cli.headers_path = headers_path;
    if (!latencies_path.empty()) cli.latencies_path = latencies_path;

    return mcsim::cli::execute(cli, std::cout, std::cerr);
}
