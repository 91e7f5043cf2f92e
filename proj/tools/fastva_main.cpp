#include <CLI11.hpp>

#include "fastva/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"FastVA scheduling simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = "out";
    double grid_ms = 1.0;
    app.add_option("--out-dir", out_dir, "Directory for output files");
    app.add_option("--grid-ms", grid_ms, "DP table granularity in milliseconds")
        ->check(CLI::PositiveNumber);

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "Run one simulation from a config file");
    run_cmd->add_option("config", run_config, "Simulation config (JSON)")->required();

    std::string sweep_spec;
    unsigned jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("spec", sweep_spec, "Sweep spec (JSON)")->required();
    sweep_cmd->add_option("--jobs", jobs, "Worker threads (0 = auto)");

    std::string cmp_config;
    std::int64_t instances = 100;
    std::uint64_t seed = 1;
    std::int64_t frames = 6;
    auto* cmp_cmd =
        app.add_subcommand("oracle-compare", "Compare heuristics against the exhaustive oracle");
    cmp_cmd->add_option("config", cmp_config, "Base config (JSON)")->required();
    cmp_cmd->add_option("--instances", instances, "Number of random instances");
    cmp_cmd->add_option("--seed", seed, "Instance generator seed");
    cmp_cmd->add_option("--frames", frames, "Frames per instance");

    CLI11_PARSE(app, argc, argv);
    const auto grid_us = fastva::ms_to_us(grid_ms);

    if (run_cmd->parsed()) return fastva::cmd_run(run_config, out_dir, grid_us);
    if (sweep_cmd->parsed()) return fastva::cmd_sweep(sweep_spec, out_dir, grid_us, jobs);
    if (cmp_cmd->parsed())
        return fastva::cmd_oracle_compare(cmp_config, instances, seed, frames, out_dir);
    return 2;
}
