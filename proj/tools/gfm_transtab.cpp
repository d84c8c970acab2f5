// gfm-transtab: command-line front end for the transient-stability toolkit.
#include <iostream>

#include <CLI11.hpp>

#include "gfm/scenario_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Transient stability of grid-forming converters under asymmetrical faults"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gfm::kToolVersion);

    gfm::CommandFlags flags;
    std::string scenario_file;
    std::string out_dir = ".";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_file, "Scenario file (INI or JSON)")->check(CLI::ExistingFile);
        sub->add_option("--fault", flags.fault, "Fault kind: slg, dlg, ll or none");
        sub->add_option("--rf", flags.r_f, "Fault resistance, pu");
        sub->add_option("--split", flags.split, "Fault location as fraction of the line from the converter, (0, 1)");
        sub->add_option("--delta-points", flags.delta_points, "Power-angle grid size");
        sub->add_option("--resolution", flags.resolution, "Clearing-time resolution, s");
        sub->add_option("--horizon", flags.horizon, "Post-clearing observation window, s");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--set", flags.sets, "Override any field: section.key=value (repeatable)");
    };

    auto* curve = app.add_subcommand("curve", "Sample the power-angle curve");
    auto* equilibria = app.add_subcommand("equilibria", "List equilibria at the power reference");
    auto* cct = app.add_subcommand("cct", "Critical clearing time search");
    auto* swing = app.add_subcommand("swing", "Swing trace for one fault duration");
    auto* simulate = app.add_subcommand("simulate", "Time-domain average-model simulation");
    auto* limiter = app.add_subcommand("limiter", "Elliptical limiter phase peaks for one reference pair");
    for (auto* sub : {curve, equilibria, cct, swing, simulate, limiter}) add_common(sub);

    for (auto* sub : {swing, simulate}) {
        sub->add_option("--fault-duration", flags.fault_duration, "Fault duration, s");
        sub->add_option("--fault-on", flags.fault_on, "Fault inception time, s");
    }
    simulate->add_option("--time", flags.sim_time, "Simulated time, s (default: clearing + 1 s)");
    simulate->add_option("--frozen-delta", flags.frozen_delta_deg, "Hold the power angle at this value, degrees");
    simulate->add_option("--downsample", flags.downsample, "Write every Nth recorded sample")->check(CLI::PositiveNumber);
    limiter->add_option("--ipos", flags.i_pos, "Positive-sequence magnitude, pu");
    limiter->add_option("--ineg", flags.i_neg, "Negative-sequence magnitude, pu");
    limiter->add_option("--phisum", flags.phisum_deg, "Sum of sequence angles, degrees");
    limiter->add_option("--ilim", flags.i_lim, "Current limit, pu");

    CLI11_PARSE(app, argc, argv);

    if (!scenario_file.empty()) flags.scenario_file = scenario_file;
    flags.out_dir = out_dir;
    const std::string command = app.get_subcommands().front()->get_name();
    const gfm::CommandResult r = gfm::run_command(command, flags);
    if (r.exit_status != 0) {
        std::cerr << r.diagnostic << '\n';
        return r.exit_status;
    }
    std::cout << r.summary << '\n';
    for (const auto& a : r.artifacts) std::cout << "wrote " << a.string() << '\n';
    return 0;
}
