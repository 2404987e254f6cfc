#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "aeroflow/error.hpp"
#include "aeroflow/fd.hpp"
#include "aeroflow/format.hpp"
#include "aeroflow/measure.hpp"
#include "aeroflow/trajectory.hpp"

// File formats: the trajectory CSV (id,time,px,py,pz,dest_px,dest_py,dest_pz),
// the flow-density samples CSV, and the key=value fit document. Reals are
// rendered with shortest round-trip precision, so write-then-read returns
// value-identical data.

namespace aeroflow {

inline constexpr std::string_view kTrajectoryHeader =
    "id,time,px,py,pz,dest_px,dest_py,dest_pz";

inline void write_trajectory(const std::vector<TrajectoryRecord>& records,
                             const std::filesystem::path& path) {
    std::string out;
    out.reserve(records.size() * 64 + 64);
    out += kTrajectoryHeader;
    out += '\n';
    for (const TrajectoryRecord& r : records) {
        out += std::to_string(r.id);
        out += ',';
        out += format_double(r.time);
        out += ',';
        out += format_double(r.position.x);
        out += ',';
        out += format_double(r.position.y);
        out += ',';
        out += format_double(r.position.z);
        out += ',';
        out += format_double(r.destination.x);
        out += ',';
        out += format_double(r.destination.y);
        out += ',';
        out += format_double(r.destination.z);
        out += '\n';
    }
    write_file_atomic(path, out);
}

struct ReadOptions {
    double expected_dt = 0.1;
    double radius = 1.0;
    double on_sphere_rel_tol = 0.02; // physical drones hover near, not on, the sphere
};

// Parse and validate a trajectory CSV. Returns records sorted by (id, time).
// Every failure names the offending line.
inline std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path,
                                                     const ReadOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader) {
        throw DataError(path.string() + ": line 1: header mismatch, expected '" +
                        std::string(kTrajectoryHeader) + "'");
    }

    std::vector<TrajectoryRecord> records;
    std::vector<std::string_view> fields;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(lineno);
        split_csv_line(line, fields);
        if (fields.size() != 8) {
            throw DataError(ctx + ": expected 8 columns, got " +
                            std::to_string(fields.size()));
        }
        TrajectoryRecord r;
        r.id = static_cast<int>(parse_int(fields[0], ctx));
        r.time = parse_double(fields[1], ctx);
        r.position = {parse_double(fields[2], ctx), parse_double(fields[3], ctx),
                      parse_double(fields[4], ctx)};
        r.destination = {parse_double(fields[5], ctx), parse_double(fields[6], ctx),
                         parse_double(fields[7], ctx)};
        if (!(r.time >= 0.0) || !r.position.finite() || !r.destination.finite()) {
            throw DataError(ctx + ": non-finite or negative-time record");
        }
        const double drift =
            std::abs(r.position.norm() - opts.radius) / opts.radius;
        if (drift > opts.on_sphere_rel_tol) {
            throw DataError(ctx + ": position is off the sphere by " +
                            format_double(drift * 100.0) + "% (tolerance " +
                            format_double(opts.on_sphere_rel_tol * 100.0) + "%)");
        }
        records.push_back(r);
    }

    // Validate the grid per drone: snapped to dt within 0.2*dt, strictly
    // monotone, no gaps.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].id != records[b].id) return records[a].id < records[b].id;
        return records[a].time < records[b].time;
    });

    long long prev_g = 0;
    int prev_id = -1;
    bool have_prev = false;
    std::vector<TrajectoryRecord> sorted;
    sorted.reserve(records.size());
    for (std::size_t idx : order) {
        const TrajectoryRecord& r = records[idx];
        const std::string ctx = path.string() + ": line " + std::to_string(idx + 2);
        const double ratio = r.time / opts.expected_dt;
        const auto g = static_cast<long long>(std::llround(ratio));
        if (std::abs(r.time - g * opts.expected_dt) > 0.2 * opts.expected_dt) {
            throw DataError(ctx + ": time " + format_double(r.time) +
                            " is off the dt grid");
        }
        if (have_prev && r.id == prev_id) {
            if (g == prev_g) throw DataError(ctx + ": duplicate (id, time)");
            if (g != prev_g + 1) {
                throw DataError(ctx + ": time gap of " +
                                format_double((g - prev_g) * opts.expected_dt) +
                                " s (expected " + format_double(opts.expected_dt) + " s)");
            }
        }
        prev_g = g;
        prev_id = r.id;
        have_prev = true;
        sorted.push_back(r);
    }
    return sorted;
}

inline constexpr std::string_view kSamplesHeader =
    "region_id,theta_bin,phi_bin,area_m2,k,q,run";

inline void write_samples(const std::vector<FlowDensitySample>& samples,
                          const std::filesystem::path& path) {
    std::string out;
    out.reserve(samples.size() * 48 + 48);
    out += kSamplesHeader;
    out += '\n';
    for (const FlowDensitySample& s : samples) {
        out += std::to_string(s.region_id);
        out += ',';
        out += std::to_string(s.theta_bin);
        out += ',';
        out += std::to_string(s.phi_bin);
        out += ',';
        out += format_double(s.area_m2);
        out += ',';
        out += format_double(s.k);
        out += ',';
        out += format_double(s.q);
        out += ',';
        out += s.run;
        out += '\n';
    }
    write_file_atomic(path, out);
}

inline std::vector<FlowDensitySample> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSamplesHeader) {
        throw DataError(path.string() + ": line 1: header mismatch, expected '" +
                        std::string(kSamplesHeader) + "'");
    }
    std::vector<FlowDensitySample> samples;
    std::vector<std::string_view> fields;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(lineno);
        split_csv_line(line, fields);
        if (fields.size() != 7) {
            throw DataError(ctx + ": expected 7 columns, got " +
                            std::to_string(fields.size()));
        }
        FlowDensitySample s;
        s.region_id = static_cast<int>(parse_int(fields[0], ctx));
        s.theta_bin = static_cast<int>(parse_int(fields[1], ctx));
        s.phi_bin = static_cast<int>(parse_int(fields[2], ctx));
        s.area_m2 = parse_double(fields[3], ctx);
        s.k = parse_double(fields[4], ctx);
        s.q = parse_double(fields[5], ctx);
        s.run = std::string(fields[6]);
        samples.push_back(std::move(s));
    }
    return samples;
}

// Fit documents are flat "key = value" text; insertion order is preserved on
// write so reruns are byte-stable.
struct FitDocument {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : entries) {
            if (k == key) {
                v = value;
                return;
            }
        }
        entries.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, long long value) { set(key, std::to_string(value)); }

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return true;
        }
        return false;
    }
    const std::string& get(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return v;
        }
        throw DataError("fit document: missing key '" + key + "'");
    }
    double get_double(const std::string& key) const {
        return parse_double(get(key), "fit document key '" + key + "'");
    }
};

inline void write_fit_document(const FitDocument& doc, const std::filesystem::path& path) {
    std::string out;
    for (const auto& [k, v] : doc.entries) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    write_file_atomic(path, out);
}

inline FitDocument read_fit_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    FitDocument doc;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(path.string() + ": line " + std::to_string(lineno) +
                            ": expected 'key = value'");
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        doc.entries.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return doc;
}

} // namespace aeroflow
