#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeroflow/error.hpp"
#include "aeroflow/geometry.hpp"
#include "aeroflow/trajectory.hpp"
#include "aeroflow/vec3.hpp"

// Edie-style macroscopic measurement: map trajectories onto an equal-angle
// spherical grid and accumulate, per cell, the time spent and the effective
// distance traveled (displacement projected onto the heading toward the
// current destination). Density k = sum(t)/( |a| dt T ), flow
// q = sum(s)/( |a| dt T ).

namespace aeroflow {

// Grid cell of an on-sphere point: theta and phi are each quantized into
// m_bar uniform bins; boundary values fall upward by floor, the domain edges
// clamp. Works for any nonzero vector (only the direction matters).
inline int cell_index(const Vec3& p, int m_bar) {
    const SphericalCoord c = to_spherical(p);
    auto bin = [m_bar](double value, double range) {
        const int b = static_cast<int>(std::floor(value / range * m_bar));
        return std::clamp(b, 0, m_bar - 1);
    };
    return bin(c.theta, kPi) * m_bar + bin(c.phi, 2.0 * kPi);
}

// Exact area of any cell in the given polar band: the equal-angle grid has
// equal azimuth widths but polar bands of different area.
inline double cell_area(int theta_bin, int m_bar, double radius) {
    const double theta_lo = theta_bin * kPi / m_bar;
    const double theta_hi = (theta_bin + 1) * kPi / m_bar;
    return radius * radius * (std::cos(theta_lo) - std::cos(theta_hi)) * (2.0 * kPi / m_bar);
}

struct RegionPartition {
    int m_bar = 7;
    double radius = 1.0;
    std::vector<double> areas; // length m_bar^2, indexed by cell_index

    static RegionPartition make(int m_bar, double radius, bool mean_area = false) {
        if (m_bar < 1) throw ConfigError("partition: m_bar must be >= 1");
        if (!(radius > 0.0)) throw ConfigError("partition: radius must be > 0");
        RegionPartition part{m_bar, radius, {}};
        part.areas.reserve(static_cast<std::size_t>(m_bar) * m_bar);
        for (int tb = 0; tb < m_bar; ++tb) {
            for (int pb = 0; pb < m_bar; ++pb) {
                part.areas.push_back(mean_area
                                         ? 4.0 * kPi * radius * radius / (m_bar * m_bar)
                                         : cell_area(tb, m_bar, radius));
            }
        }
        return part;
    }
};

// Displacement over one step projected onto the unit tangent toward the
// current destination. A drone standing at its destination contributes zero.
inline double effective_step(const Vec3& p_t, const Vec3& p_t1, const Vec3& dest) {
    if (angle_between(p_t, dest) < 1e-12) return 0.0;
    return dot(p_t1 - p_t, tangent_dir(p_t, dest));
}

struct FlowDensitySample {
    int region_id = 0;
    int theta_bin = 0;
    int phi_bin = 0;
    double area_m2 = 0.0;
    double k = 0.0; // drones / m^2
    double q = 0.0; // drones / (m s)
    std::string run; // tag of the originating trajectory file, "" when unused
};

struct MeasureConfig {
    int m_bar = 7;
    double trim_start = 15.0; // s removed from the start of the window
    double trim_end = 0.0;    // s removed from the end of the window
    double dt = 0.1;          // s
    double radius = 1.0;      // m
    bool mean_area = false;   // use 4*pi*R^2/M for every cell instead of exact areas
};

inline void validate(const MeasureConfig& cfg) {
    if (cfg.m_bar < 1) throw ConfigError("measure: m_bar must be >= 1");
    if (cfg.trim_start < 0.0 || cfg.trim_end < 0.0) {
        throw ConfigError("measure: trims must be >= 0");
    }
    if (!(cfg.dt > 0.0)) throw ConfigError("measure: dt must be > 0");
    if (!(cfg.radius > 0.0)) throw ConfigError("measure: radius must be > 0");
}

struct MeasureResult {
    std::vector<FlowDensitySample> samples; // one per cell, zero cells included
    long long window_steps = 0;             // T, shared denominator
    long long total_pairs = 0;              // in-window record pairs
    std::vector<long long> cell_steps;      // per-cell accumulated step counts
};

namespace detail {

inline long long snap_to_grid(double time, double dt, std::size_t row) {
    const double ratio = time / dt;
    const auto g = static_cast<long long>(std::llround(ratio));
    if (std::abs(time - g * dt) > 0.2 * dt) {
        throw DataError("measure: time " + std::to_string(time) + " at row " +
                        std::to_string(row) + " is off the dt grid");
    }
    return g;
}

inline Vec3 project_to_sphere(const Vec3& p, double radius, std::size_t row) {
    const double n = p.norm();
    if (!(n > 0.0) || !p.finite()) {
        throw DataError("measure: degenerate position at row " + std::to_string(row));
    }
    return p * (radius / n);
}

} // namespace detail

// Fold a (drone, time)-sorted record stream into per-cell Edie samples.
// Positions and destinations are projected onto the measurement sphere first;
// each step is credited in full to the cell containing its start point.
inline MeasureResult accumulate(std::span<const TrajectoryRecord> records,
                                const MeasureConfig& cfg) {
    validate(cfg);
    if (records.empty()) throw DataError("measure: no records");

    const int cells = cfg.m_bar * cfg.m_bar;
    MeasureResult result;
    result.cell_steps.assign(static_cast<std::size_t>(cells), 0);
    std::vector<double> cell_distance(static_cast<std::size_t>(cells), 0.0);

    // Window bounds on the step grid. trim_end counts back from the last
    // record in the file.
    long long g_max_all = 0;
    for (std::size_t r = 0; r < records.size(); ++r) {
        g_max_all = std::max(g_max_all, detail::snap_to_grid(records[r].time, cfg.dt, r));
    }
    const auto g_lo = static_cast<long long>(std::ceil(cfg.trim_start / cfg.dt - 1e-6));
    const long long g_hi = g_max_all - static_cast<long long>(std::ceil(cfg.trim_end / cfg.dt - 1e-6));
    if (g_hi <= g_lo) throw DataError("measure: trimmed window is empty");
    result.window_steps = g_hi - g_lo;

    std::size_t r = 0;
    int last_id = records.front().id - 1;
    while (r < records.size()) {
        const int id = records[r].id;
        if (id < last_id) {
            throw DataError("measure: records not sorted by drone id at row " +
                            std::to_string(r));
        }
        last_id = id;

        // One drone's contiguous block.
        std::size_t r_end = r;
        while (r_end < records.size() && records[r_end].id == id) ++r_end;

        long long prev_g = 0;
        bool have_prev = false;
        for (std::size_t j = r; j < r_end; ++j) {
            const long long g = detail::snap_to_grid(records[j].time, cfg.dt, j);
            if (have_prev) {
                if (g == prev_g) {
                    throw DataError("measure: duplicate (id, time) at row " +
                                    std::to_string(j));
                }
                if (g < prev_g) {
                    throw DataError("measure: non-monotone time at row " + std::to_string(j));
                }
                if (g != prev_g + 1) {
                    throw DataError("measure: time gap before row " + std::to_string(j) +
                                    " (expected dt-spaced samples)");
                }
                // Step from grid index g-1 to g; credit it to the cell holding
                // the start point when the whole step lies in the window.
                if (prev_g >= g_lo && g <= g_hi) {
                    try {
                        const Vec3 p0 = detail::project_to_sphere(records[j - 1].position,
                                                                  cfg.radius, j - 1);
                        const Vec3 p1 =
                            detail::project_to_sphere(records[j].position, cfg.radius, j);
                        const Vec3 dest = detail::project_to_sphere(
                            records[j - 1].destination, cfg.radius, j - 1);
                        const int cell = cell_index(p0, cfg.m_bar);
                        ++result.cell_steps[static_cast<std::size_t>(cell)];
                        ++result.total_pairs;
                        cell_distance[static_cast<std::size_t>(cell)] +=
                            effective_step(p0, p1, dest);
                    } catch (const GeometryError& e) {
                        throw DataError("measure: row " + std::to_string(j) + ": " + e.what());
                    }
                }
            }
            prev_g = g;
            have_prev = true;
        }
        r = r_end;
    }

    const RegionPartition part = RegionPartition::make(cfg.m_bar, cfg.radius, cfg.mean_area);
    const auto window = static_cast<double>(result.window_steps);
    result.samples.reserve(static_cast<std::size_t>(cells));
    for (int m = 0; m < cells; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        FlowDensitySample s;
        s.region_id = m;
        s.theta_bin = m / cfg.m_bar;
        s.phi_bin = m % cfg.m_bar;
        s.area_m2 = part.areas[idx];
        s.k = static_cast<double>(result.cell_steps[idx]) / (s.area_m2 * window);
        s.q = cell_distance[idx] / (s.area_m2 * cfg.dt * window);
        result.samples.push_back(std::move(s));
    }
    return result;
}

} // namespace aeroflow
