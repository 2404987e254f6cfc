#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aeroflow/pipeline.hpp"

// Command-line front end. Exit codes: 0 success, 2 usage error,
// 3 data-integrity error, 4 numerical failure.

namespace aeroflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Drone traffic simulation and fundamental-diagram calibration on a "
                 "spherical airspace"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    SimulateOptions sim_opts;
    CLI::App* sim = app.add_subcommand("simulate", "Run a traffic simulation");
    sim->add_option("--drones", sim_opts.drones, "Fleet size");
    sim->add_option("--scenario", sim_opts.scenario, "Demand scenario: 1 random, 2 zoned, 3 stations");
    sim->add_option("--control", sim_opts.control, "Control law: stop | detour");
    sim->add_option("--spacing", sim_opts.spacing, "Safe spacing (m)");
    sim->add_option("--dt", sim_opts.dt, "Time step (s)");
    sim->add_option("--speed", sim_opts.speed, "Cruise speed (m/s)");
    sim->add_option("--radius", sim_opts.radius, "Sphere radius (m)");
    sim->add_option("--duration", sim_opts.duration, "Run length (s)");
    sim->add_option("--flights", sim_opts.flights, "Flights per drone");
    sim->add_option("--zone-half-angle", sim_opts.zone_half_angle,
                    "Polar cap half-angle for scenario 2 (rad)");
    sim->add_option("--candidates", sim_opts.candidates, "Detour candidate angles");
    sim->add_option("--sensing-radius", sim_opts.sensing_radius,
                    "Detour constraint radius (m); <0 uses --spacing");
    sim->add_option("--seed", sim_opts.seed, "RNG seed");
    sim->add_option("--out", sim_opts.out, "Trajectory CSV path");

    MeasureOptions meas_opts;
    CLI::App* meas = app.add_subcommand("measure", "Edie flow-density samples from trajectories");
    meas->add_option("--in", meas_opts.inputs, "Trajectory CSV(s)")
        ->required()
        ->delimiter(',');
    meas->add_option("--mbar", meas_opts.m_bar, "Angular bins per dimension");
    meas->add_option("--trim-start", meas_opts.trim_start, "Seconds removed from the start");
    meas->add_option("--trim-end", meas_opts.trim_end, "Seconds removed from the end");
    meas->add_option("--dt", meas_opts.dt, "Sampling interval (s)");
    meas->add_option("--radius", meas_opts.radius, "Sphere radius (m)");
    meas->add_flag("--mean-area", meas_opts.mean_area,
                   "Use the mean cell area 4*pi*R^2/M for every cell");
    meas->add_option("--out", meas_opts.out, "Samples CSV path");

    FitOptions fit_opts;
    CLI::App* fit = app.add_subcommand("fit", "Calibrate Drake's model on samples");
    fit->add_option("--in", fit_opts.input, "Samples CSV")->required();
    fit->add_option("--bins", fit_opts.bins, "Density bins for the percentile filter");
    fit->add_option("--percentile", fit_opts.percentile, "Flow percentile kept per bin");
    fit->add_option("--out", fit_opts.out, "Fit document path");
    fit->add_option("--plot-data", fit_opts.plot_data,
                    "Optional CSV of retained points plus fitted curve");

    ScaleOptions scale_opts;
    CLI::App* scale = app.add_subcommand("scale", "Scale a fit to other size/speed");
    scale->add_option("--fd", scale_opts.fd_path, "Fit document")->required();
    scale->add_option("--size-from", scale_opts.size_from, "Vehicle size in the data (m)");
    scale->add_option("--size-to", scale_opts.size_to, "Target vehicle size (m)");
    scale->add_option("--speed-from", scale_opts.speed_from, "Cruise speed in the data (m/s)");
    scale->add_option("--speed-to", scale_opts.speed_to, "Target cruise speed (m/s)");
    scale->add_flag("--use-analytic", scale_opts.use_analytic,
                    "Scale the analytic (k_c, q_max) instead of the empirical pair");
    scale->add_option("--out", scale_opts.out, "Output document path (default: stdout)");

    ReportOptions rep_opts;
    CLI::App* rep = app.add_subcommand("report", "Aggregate fit documents in a sweep directory");
    rep->add_option("--dir", rep_opts.dir, "Sweep directory")->required();
    rep->add_option("--out", rep_opts.out, "Report CSV path (default: <dir>/report.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) cmd_simulate(sim_opts);
        if (meas->parsed()) cmd_measure(meas_opts);
        if (fit->parsed()) cmd_fit(fit_opts);
        if (scale->parsed()) cmd_scale(scale_opts, out);
        if (rep->parsed()) cmd_report(rep_opts, err);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const FitError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace aeroflow::cli
