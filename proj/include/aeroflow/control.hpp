#pragma once

#include <cassert>
#include <span>
#include <vector>

#include "aeroflow/error.hpp"
#include "aeroflow/geometry.hpp"
#include "aeroflow/vec3.hpp"

// Per-step collision-avoidance decisions. Conflicts are declared on the
// Euclidean (chord) spacing h_ij = |p_i - p_j| against the safe spacing.
// Both laws are pure functions of a frozen start-of-step snapshot, so the
// evaluation order of drones within a step cannot change the outcome.

namespace aeroflow {

enum class ControlLaw { StopAndYield, CircularDetour };

inline const char* to_string(ControlLaw law) {
    return law == ControlLaw::StopAndYield ? "stop" : "detour";
}

struct ControlConfig {
    ControlLaw law = ControlLaw::StopAndYield;
    double safe_spacing = 0.5; // chord distance at or below which a conflict exists
    int n_candidates = 64;     // detour angles sampled in the open interval (0, 2*pi)
    double sensing_radius = -1.0; // neighbors constraining the detour; <0 -> safe_spacing
};

inline double effective_sensing_radius(const ControlConfig& cfg) {
    return cfg.sensing_radius < 0.0 ? cfg.safe_spacing : cfg.sensing_radius;
}

inline void validate(const ControlConfig& cfg) {
    if (!(cfg.safe_spacing > 0.0)) throw ConfigError("control: safe_spacing must be > 0");
    if (cfg.n_candidates < 4) throw ConfigError("control: n_candidates must be >= 4");
    if (!(effective_sensing_radius(cfg) > 0.0)) {
        throw ConfigError("control: sensing_radius must be > 0");
    }
}

// Position snapshot entry for one active drone.
struct Neighbor {
    int id = 0;
    Vec3 position;
};

using Snapshot = std::vector<Neighbor>;

struct ControlDecision {
    enum class Kind { Proceed, Halt };
    Kind kind = Kind::Halt;
    Vec3 direction; // unit tangent at the drone's position when Proceed

    static ControlDecision halt() { return {Kind::Halt, {}}; }
    static ControlDecision proceed(const Vec3& dir) { return {Kind::Proceed, dir}; }
    bool is_halt() const { return kind == Kind::Halt; }
};

inline const Vec3& snapshot_position(const Snapshot& snap, int id) {
    for (const Neighbor& n : snap) {
        if (n.id == id) return n.position;
    }
    throw Error("snapshot does not contain drone " + std::to_string(id));
}

// Ids of drones within chord distance h_hat of drone i (boundary inclusive).
inline std::vector<int> detect_conflicts(int i, const Snapshot& snap, double h_hat) {
    const Vec3& pi = snapshot_position(snap, i);
    std::vector<int> out;
    for (const Neighbor& n : snap) {
        if (n.id == i) continue;
        if (chord_distance(pi, n.position) <= h_hat) out.push_back(n.id);
    }
    return out;
}

// Stop-and-yield: the lower-priority drone (larger index) halts whenever a
// higher-priority drone is in conflict; otherwise it proceeds on its nominal
// heading.
inline ControlDecision stop_yield(int i, std::span<const int> conflicts,
                                  const Snapshot& snap, const Vec3& dest) {
    for (int j : conflicts) {
        if (j < i) return ControlDecision::halt();
    }
    return ControlDecision::proceed(tangent_dir(snapshot_position(snap, i), dest));
}

// Circular detour: rotate the nominal heading about the local outward normal,
// keeping the smallest deviation that does not approach any constraining
// neighbor. Candidate angles sample the open interval (0, 2*pi) uniformly;
// with no safe candidate the drone halts.
inline ControlDecision circular_detour(int i, std::span<const int> constraint_ids,
                                       const Snapshot& snap, const Vec3& dest,
                                       int n_candidates) {
    const Vec3& p = snapshot_position(snap, i);
    const Vec3 nominal = tangent_dir(p, dest);
    const Vec3 axis = p.normalized();

    std::vector<Vec3> toward_neighbor;
    toward_neighbor.reserve(constraint_ids.size());
    for (int j : constraint_ids) {
        try {
            toward_neighbor.push_back(tangent_dir(p, snapshot_position(snap, j)));
        } catch (const GeometryError&) {
            // Neighbor coincident (or antipodal) with us: no direction can be
            // shown not to approach it.
            return ControlDecision::halt();
        }
    }

    double best_alignment = -2.0;
    Vec3 best_dir;
    bool found = false;
    for (int s = 1; s <= n_candidates; ++s) {
        const double psi = 2.0 * kPi * s / (n_candidates + 1);
        const Vec3 rotated = rodrigues_rotate(nominal, axis, psi).normalized();
        bool safe = true;
        for (const Vec3& d : toward_neighbor) {
            if (dot(rotated, d) > 0.0) {
                safe = false;
                break;
            }
        }
        if (!safe) continue;
        const double alignment = dot(rotated, nominal);
        if (alignment > best_alignment) {
            best_alignment = alignment;
            best_dir = rotated;
            found = true;
        }
    }
    if (!found) return ControlDecision::halt();

#ifndef NDEBUG
    for (const Vec3& d : toward_neighbor) assert(dot(best_dir, d) <= 0.0);
#endif
    return ControlDecision::proceed(best_dir);
}

} // namespace aeroflow
