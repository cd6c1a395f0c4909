#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thermoflow/cli/commands.hpp"

namespace {

using thermoflow::cli::CommandOptions;

void add_common(CLI::App* cmd, CommandOptions& opt)
{
    auto& o = opt.overrides;
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--config", opt.config_path, "Experiment description (JSON)");
    cmd->add_option("--h", o.h, "Step size");
    cmd->add_option("--steps", o.steps, "Number of steps");
    cmd->add_option("--gamma", o.gamma, "Friction coefficient");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--out-csv", o.out_csv, "CSV output path");
    cmd->add_option("--out-svg", o.out_svg, "SVG output path");
    cmd->add_option("--integrator", o.integrator,
                    "dg-midpoint | dg-mean-value | dg-itoh-abe | dg-harmonic-exact | herglotz | "
                    "herglotz-harmonic-exact | reference | euler");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structure-preserving integrators for thermodynamical systems with friction"};
    app.require_subcommand(1);

    CommandOptions opt;
    auto* simulate = app.add_subcommand("simulate", "Integrate a system and write the trajectory");
    auto* compare = app.add_subcommand("compare", "Error of an integrator against the reference solution");
    auto* check = app.add_subcommand("check", "Run an invariant suite");
    auto* sweep = app.add_subcommand("sweep", "Summary statistics over a grid of h and gamma");
    for (auto* cmd : {simulate, compare, check, sweep}) add_common(cmd, opt);

    check->add_option("suite,--suite", opt.suite, "geometry | gradients | integrators | systems | all");
    sweep->add_option("--h-list", opt.h_list, "Comma-separated step sizes");
    sweep->add_option("--gamma-list", opt.gamma_list, "Comma-separated friction coefficients");
    sweep->add_flag("--order", opt.order, "Estimate the convergence order per cell");
    sweep->add_option("--threads", opt.threads, "Worker threads (default: hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return thermoflow::cli::kExitConfigError;
    }

    if (*simulate) return thermoflow::cli::cmd_simulate(opt, std::cout, std::cerr);
    if (*compare) return thermoflow::cli::cmd_compare(opt, std::cout, std::cerr);
    if (*check) return thermoflow::cli::cmd_check(opt, std::cout, std::cerr);
    return thermoflow::cli::cmd_sweep(opt, std::cout, std::cerr);
}
