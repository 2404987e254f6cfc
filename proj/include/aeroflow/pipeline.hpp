#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "aeroflow/error.hpp"
#include "aeroflow/fd.hpp"
#include "aeroflow/io.hpp"
#include "aeroflow/measure.hpp"
#include "aeroflow/sim.hpp"

// The end-to-end pipeline behind the CLI subcommands:
// simulate -> measure -> fit -> scale -> report. Every artifact gets a
// sibling <artifact>.manifest.json with the fully resolved configuration, so
// any output can be reproduced byte-identically.

namespace aeroflow::cli {

inline constexpr const char* kToolVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

// A bare filename goes into $AEROFLOW_OUT_DIR when that is set.
inline fs::path resolve_out_path(const std::string& out) {
    fs::path p(out);
    if (!p.has_parent_path()) {
        if (const char* dir = std::getenv("AEROFLOW_OUT_DIR"); dir != nullptr && *dir) {
            return fs::path(dir) / p;
        }
    }
    return p;
}

inline void write_manifest(const fs::path& artifact, const json& manifest) {
    write_file_atomic(artifact.string() + ".manifest.json", manifest.dump(2) + "\n");
}

inline std::optional<json> read_manifest(const fs::path& artifact) {
    const fs::path mpath = artifact.string() + ".manifest.json";
    std::ifstream in(mpath);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    int drones = 4;
    int scenario = 1;            // 1 random, 2 zoned, 3 stations
    std::string control = "stop"; // stop | detour
    double spacing = 0.5;        // m
    double dt = 0.1;             // s
    double speed = 0.5;          // m/s
    double radius = 1.0;         // m
    double duration = 50.0;      // s
    int flights = 1000;
    double zone_half_angle = kPi / 3.0;
    int candidates = 64;
    double sensing_radius = -1.0;
    std::uint64_t seed = 0;
    std::string out = "trajectory.csv";
};

inline SimConfig to_sim_config(const SimulateOptions& o) {
    SimConfig cfg;
    cfg.dt = o.dt;
    if (!(o.dt > 0.0)) throw ConfigError("simulate: --dt must be > 0");
    if (!(o.duration > 0.0)) throw ConfigError("simulate: --duration must be > 0");
    cfg.n_steps = static_cast<int>(std::llround(o.duration / o.dt));
    cfg.cruise_speed = o.speed;
    cfg.radius = o.radius;
    if (o.scenario < 1 || o.scenario > 3) {
        throw ConfigError("simulate: --scenario must be 1, 2, or 3");
    }
    cfg.scenario.type = static_cast<ScenarioType>(o.scenario);
    cfg.scenario.radius = o.radius;
    cfg.scenario.n_drones = o.drones;
    cfg.scenario.n_flights = o.flights;
    cfg.scenario.rng_seed = o.seed;
    cfg.scenario.zone_half_angle = o.zone_half_angle;
    if (o.control == "stop") {
        cfg.control.law = ControlLaw::StopAndYield;
    } else if (o.control == "detour") {
        cfg.control.law = ControlLaw::CircularDetour;
    } else {
        throw ConfigError("simulate: --control must be 'stop' or 'detour'");
    }
    cfg.control.safe_spacing = o.spacing;
    cfg.control.n_candidates = o.candidates;
    cfg.control.sensing_radius = o.sensing_radius;
    validate(cfg);
    return cfg;
}

inline json to_json(const SimulateOptions& o) {
    return json{{"drones", o.drones},
                {"scenario", o.scenario},
                {"control", o.control},
                {"spacing", o.spacing},
                {"dt", o.dt},
                {"speed", o.speed},
                {"radius", o.radius},
                {"duration", o.duration},
                {"flights", o.flights},
                {"zone_half_angle", o.zone_half_angle},
                {"candidates", o.candidates},
                {"sensing_radius", o.sensing_radius},
                {"seed", o.seed}};
}

inline fs::path cmd_simulate(const SimulateOptions& opts) {
    const SimConfig cfg = to_sim_config(opts);
    const std::vector<TrajectoryRecord> records = run(cfg);
    const fs::path out = resolve_out_path(opts.out);
    write_trajectory(records, out);
    json manifest{{"tool", "aeroflow"},
                  {"version", kToolVersion},
                  {"subcommand", "simulate"},
                  {"options", to_json(opts)},
                  {"outputs", json::array({out.string()})}};
    write_manifest(out, manifest);
    return out;
}

// ----------------------------------------------------------------- measure

struct MeasureOptions {
    std::vector<std::string> inputs;
    int m_bar = 7;
    double trim_start = 15.0;
    double trim_end = 0.0;
    double dt = 0.1;
    double radius = 1.0;
    bool mean_area = false;
    std::string out = "samples.csv";
};

inline fs::path cmd_measure(const MeasureOptions& opts) {
    if (opts.inputs.empty()) throw ConfigError("measure: at least one --in file required");
    MeasureConfig mcfg;
    mcfg.m_bar = opts.m_bar;
    mcfg.trim_start = opts.trim_start;
    mcfg.trim_end = opts.trim_end;
    mcfg.dt = opts.dt;
    mcfg.radius = opts.radius;
    mcfg.mean_area = opts.mean_area;
    validate(mcfg);

    std::vector<FlowDensitySample> pooled;
    std::set<std::string> provenance_keys;
    json provenance;
    for (const std::string& input : opts.inputs) {
        const fs::path ipath(input);
        std::vector<TrajectoryRecord> records;
        try {
            records = read_trajectory(ipath, {opts.dt, opts.radius});
            MeasureResult res = accumulate(records, mcfg);
            const std::string tag = ipath.stem().string();
            for (FlowDensitySample& s : res.samples) {
                s.run = tag;
                pooled.push_back(std::move(s));
            }
        } catch (const DataError& e) {
            throw DataError(std::string("measure: ") + e.what());
        }
        if (const auto m = read_manifest(ipath); m && m->contains("options")) {
            const json& o = (*m)["options"];
            if (o.contains("scenario") && o.contains("control") && o.contains("spacing")) {
                json p{{"scenario", o["scenario"]},
                       {"control", o["control"]},
                       {"spacing", o["spacing"]}};
                provenance_keys.insert(p.dump());
                provenance = p;
            }
        }
    }

    const fs::path out = resolve_out_path(opts.out);
    write_samples(pooled, out);
    json manifest{{"tool", "aeroflow"},
                  {"version", kToolVersion},
                  {"subcommand", "measure"},
                  {"options",
                   json{{"m_bar", opts.m_bar},
                        {"trim_start", opts.trim_start},
                        {"trim_end", opts.trim_end},
                        {"dt", opts.dt},
                        {"radius", opts.radius},
                        {"mean_area", opts.mean_area}}},
                  {"inputs", opts.inputs},
                  {"outputs", json::array({out.string()})}};
    if (provenance_keys.size() == 1) manifest["provenance"] = provenance;
    write_manifest(out, manifest);
    return out;
}

// --------------------------------------------------------------------- fit

struct FitOptions {
    std::string input;
    int bins = 20;
    double percentile = 75.0;
    std::string out = "fit.txt";
    std::string plot_data; // optional
};

inline fs::path cmd_fit(const FitOptions& opts) {
    const fs::path in = fs::path(opts.input);
    const std::vector<FlowDensitySample> all = read_samples(in);

    // Cells that never saw traffic carry no state information.
    std::vector<FlowDensitySample> nonzero;
    nonzero.reserve(all.size());
    for (const auto& s : all) {
        if (s.k > 0.0) nonzero.push_back(s);
    }
    if (nonzero.empty()) throw FitError("fit: no samples with positive density");

    const FilterConfig fcfg{opts.bins, opts.percentile};
    const std::vector<FlowDensitySample> retained = percentile_filter(nonzero, fcfg);
    const FdFit fit = fit_drake(retained);

    FitDocument doc;
    doc.set("tool_version", std::string(kToolVersion));
    doc.set("bins", static_cast<long long>(opts.bins));
    doc.set("percentile", opts.percentile);
    if (const auto m = read_manifest(in); m && m->contains("options")) {
        const json& o = (*m)["options"];
        if (o.contains("m_bar")) doc.set("m_bar", o["m_bar"].get<long long>());
        if (o.contains("trim_start")) doc.set("trim_start", o["trim_start"].get<double>());
        if (o.contains("trim_end")) doc.set("trim_end", o["trim_end"].get<double>());
    }
    doc.set("n_samples_used", static_cast<long long>(fit.n_samples_used));
    doc.set("v_f", fit.v_f);
    doc.set("alpha", fit.alpha);
    doc.set("k_c_analytic", fit.k_c_analytic);
    doc.set("q_max_analytic", fit.q_max_analytic);
    doc.set("k_c_empirical", fit.k_at_qmax_empirical);
    doc.set("q_max_empirical", fit.q_max_empirical);
    doc.set("r2", fit.r2);
    doc.set("rmse", fit.rmse);
    doc.set("rmse_units", std::string("drones/(m*s)"));

    const fs::path out = resolve_out_path(opts.out);
    write_fit_document(doc, out);

    json manifest{{"tool", "aeroflow"},
                  {"version", kToolVersion},
                  {"subcommand", "fit"},
                  {"options",
                   json{{"bins", opts.bins},
                        {"percentile", opts.percentile},
                        {"plot_data", opts.plot_data}}},
                  {"inputs", json::array({opts.input})},
                  {"outputs", json::array({out.string()})}};
    if (const auto m = read_manifest(in); m && m->contains("provenance")) {
        manifest["provenance"] = (*m)["provenance"];
    }
    write_manifest(out, manifest);

    if (!opts.plot_data.empty()) {
        double k_max = 0.0;
        for (const auto& s : retained) k_max = std::max(k_max, s.k);
        std::string plot = "kind,k,q\n";
        for (const auto& s : retained) {
            plot += "point," + format_double(s.k) + "," + format_double(s.q) + "\n";
        }
        constexpr int kCurvePoints = 200;
        for (int j = 0; j < kCurvePoints; ++j) {
            const double k = k_max * j / (kCurvePoints - 1);
            plot += "curve," + format_double(k) + "," +
                    format_double(drake_eval(k, fit.v_f, fit.alpha)) + "\n";
        }
        const fs::path ppath = resolve_out_path(opts.plot_data);
        write_file_atomic(ppath, plot);
        write_manifest(ppath, manifest);
    }
    return out;
}

// ------------------------------------------------------------------- scale

struct ScaleOptions {
    std::string fd_path;
    double size_from = 0.1;
    double size_to = 2.0;
    double speed_from = 0.5;
    double speed_to = 10.0;
    bool use_analytic = false;
    std::string out; // empty -> stdout
};

inline FitDocument scale_document(const FitDocument& in, const ScaleOptions& opts) {
    if (!(opts.size_from > 0.0) || !(opts.size_to > 0.0) || !(opts.speed_from > 0.0) ||
        !(opts.speed_to > 0.0)) {
        throw ConfigError("scale: size/speed factors must be > 0");
    }
    const ScaleFactors f{opts.size_to / opts.size_from, opts.speed_to / opts.speed_from};

    FdFit fit;
    fit.v_f = in.get_double("v_f");
    fit.k_c_analytic = in.has("k_c_analytic") ? in.get_double("k_c_analytic") : 0.0;
    fit.q_max_analytic = in.has("q_max_analytic") ? in.get_double("q_max_analytic") : 0.0;
    fit.k_at_qmax_empirical = in.has("k_c_empirical") ? in.get_double("k_c_empirical") : 0.0;
    fit.q_max_empirical = in.has("q_max_empirical") ? in.get_double("q_max_empirical") : 0.0;
    const ScaledFit scaled = scale_fit(fit, f, !opts.use_analytic);

    FitDocument out = in;
    out.set("delta_eta", f.delta_eta);
    out.set("delta_v", f.delta_v);
    out.set("scaled_from", std::string(opts.use_analytic ? "analytic" : "empirical"));
    out.set("v_f_scaled", scaled.v_f_scaled);
    out.set("k_c_scaled_per_km2", scaled.k_c_scaled_per_km2);
    out.set("q_max_scaled_per_km_h", scaled.q_max_scaled_per_km_h);
    return out;
}

inline void cmd_scale(const ScaleOptions& opts, std::ostream& stdout_stream = std::cout) {
    const FitDocument in = read_fit_document(opts.fd_path);
    const FitDocument out = scale_document(in, opts);
    if (opts.out.empty()) {
        for (const auto& [k, v] : out.entries) stdout_stream << k << " = " << v << "\n";
        return;
    }
    const fs::path opath = resolve_out_path(opts.out);
    write_fit_document(out, opath);
    json manifest{{"tool", "aeroflow"},
                  {"version", kToolVersion},
                  {"subcommand", "scale"},
                  {"options",
                   json{{"size_from", opts.size_from},
                        {"size_to", opts.size_to},
                        {"speed_from", opts.speed_from},
                        {"speed_to", opts.speed_to},
                        {"use_analytic", opts.use_analytic}}},
                  {"inputs", json::array({opts.fd_path})},
                  {"outputs", json::array({opath.string()})}};
    write_manifest(opath, manifest);
}

// ------------------------------------------------------------------ report

struct ReportOptions {
    std::string dir;
    std::string out; // CSV path; empty -> <dir>/report.csv
};

struct ReportRow {
    std::string scenario;
    std::string control;
    std::string spacing;
    std::string path;
    FitDocument doc;
};

inline const std::vector<std::string>& report_value_keys() {
    static const std::vector<std::string> keys{
        "v_f",           "alpha", "k_c_analytic", "q_max_analytic", "k_c_empirical",
        "q_max_empirical", "r2",  "rmse",         "n_samples_used"};
    return keys;
}

inline void cmd_report(const ReportOptions& opts, std::ostream& warn = std::cerr) {
    const fs::path dir(opts.dir);
    if (!fs::is_directory(dir)) throw ConfigError("report: not a directory: " + opts.dir);

    std::vector<fs::path> fit_files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() >= 7 && name.substr(name.size() - 7) == "fit.txt") {
            fit_files.push_back(entry.path());
        }
    }
    std::sort(fit_files.begin(), fit_files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    if (fit_files.empty()) {
        warn << "report: warning: no fit documents found under " << opts.dir << "\n";
    }

    std::vector<ReportRow> rows;
    for (const fs::path& f : fit_files) {
        ReportRow row;
        row.path = fs::relative(f, dir).generic_string();
        try {
            row.doc = read_fit_document(f);
        } catch (const DataError& e) {
            warn << "report: warning: skipping " << f.string() << ": " << e.what() << "\n";
            continue;
        }
        if (const auto m = read_manifest(f); m && m->contains("provenance")) {
            const json& p = (*m)["provenance"];
            if (p.contains("scenario")) row.scenario = p["scenario"].dump();
            if (p.contains("control"))
                row.control = p["control"].is_string() ? p["control"].get<std::string>()
                                                       : p["control"].dump();
            if (p.contains("spacing")) row.spacing = p["spacing"].dump();
        } else {
            warn << "report: warning: no provenance manifest for " << f.string() << "\n";
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(a.scenario, a.control, a.spacing, a.path) <
               std::tie(b.scenario, b.control, b.spacing, b.path);
    });

    std::vector<std::string> header{"scenario", "control", "spacing"};
    for (const std::string& k : report_value_keys()) header.push_back(k);
    header.push_back("path");

    std::vector<std::vector<std::string>> table;
    table.push_back(header);
    for (const ReportRow& row : rows) {
        std::vector<std::string> cells{row.scenario, row.control, row.spacing};
        for (const std::string& key : report_value_keys()) {
            cells.push_back(row.doc.has(key) ? row.doc.get(key) : "");
        }
        cells.push_back(row.path);
        table.push_back(std::move(cells));
    }

    const fs::path csv_path =
        opts.out.empty() ? dir / "report.csv" : resolve_out_path(opts.out);
    std::string csv;
    for (const auto& cells : table) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) csv += ',';
            csv += cells[i];
        }
        csv += '\n';
    }
    write_file_atomic(csv_path, csv);

    // Aligned text twin next to the CSV.
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& cells : table) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            widths[i] = std::max(widths[i], cells[i].size());
        }
    }
    std::string txt;
    for (const auto& cells : table) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) txt += "  ";
            txt += cells[i];
            txt.append(widths[i] - cells[i].size(), ' ');
        }
        while (!txt.empty() && txt.back() == ' ') txt.pop_back();
        txt += '\n';
    }
    fs::path txt_path = csv_path;
    txt_path.replace_extension(".txt");
    write_file_atomic(txt_path, txt);

    json manifest{{"tool", "aeroflow"},
                  {"version", kToolVersion},
                  {"subcommand", "report"},
                  {"options", json{{"dir", opts.dir}}},
                  {"outputs", json::array({csv_path.string(), txt_path.string()})}};
    write_manifest(csv_path, manifest);
}

} // namespace aeroflow::cli
