// Command-line driver: solve | simulate | compare | variance, each taking a
// JSON experiment config and writing CSV/JSON results.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bipspec/orchestrator.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Limiting spectra of sparse weighted bipartite random graphs"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--jobs", jobs, "worker pool size")->check(CLI::PositiveNumber);
    };

    CLI::App* solve = app.add_subcommand(
        "solve", "analytic density: fixed-point solves and Stieltjes inversion");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo: sample the ensemble and dump spectra");
    CLI::App* compare = app.add_subcommand(
        "compare", "analytic prediction vs seed-averaged empirical CDF");
    CLI::App* variance = app.add_subcommand(
        "variance", "sample variance of the empirical Stieltjes transform vs N");
    for (CLI::App* sub : {solve, simulate, compare, variance}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    bipspec::ExperimentConfig cfg;
    try {
        cfg = bipspec::ExperimentConfig::load(config_path);
    } catch (const bipspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (solve->parsed()) return bipspec::cmd_solve(cfg, out_dir, jobs);
    if (simulate->parsed()) return bipspec::cmd_simulate(cfg, out_dir, jobs);
    if (compare->parsed()) return bipspec::cmd_compare(cfg, out_dir, jobs);
    if (variance->parsed()) return bipspec::cmd_variance(cfg, out_dir, jobs);
    return 2;
}
