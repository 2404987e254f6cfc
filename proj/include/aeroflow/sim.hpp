#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "aeroflow/control.hpp"
#include "aeroflow/error.hpp"
#include "aeroflow/geometry.hpp"
#include "aeroflow/scenario.hpp"
#include "aeroflow/trajectory.hpp"

// The simulation driver: advance a fleet over T steps of length dt under a
// control law, logging every active drone's position and current destination
// at each sampling instant. A run is deterministic given its config.

namespace aeroflow {

struct DroneState {
    int id = 0;
    Vec3 position;
    FlightPlan plan;
    std::size_t current_leg = 0; // 0-based leg index into plan
    bool finished = false;

    const Vec3& destination() const { return plan.waypoints[current_leg + 1]; }
};

struct SimConfig {
    double dt = 0.1;          // s
    int n_steps = 500;        // T
    double cruise_speed = 0.5; // v, m/s
    double radius = 1.0;      // R, m
    ScenarioConfig scenario;
    ControlConfig control;
};

inline void validate(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("sim: dt must be > 0");
    if (cfg.n_steps < 1) throw ConfigError("sim: n_steps must be >= 1");
    if (!(cfg.cruise_speed > 0.0)) throw ConfigError("sim: cruise_speed must be > 0");
    if (!(cfg.radius > 0.0)) throw ConfigError("sim: radius must be > 0");
    if (!(cfg.cruise_speed * cfg.dt < kPi * cfg.radius)) {
        throw ConfigError("sim: per-step arc v*dt must be below pi*R");
    }
    validate(cfg.scenario);
    validate(cfg.control);
}

inline std::vector<DroneState> init_states(const SimConfig& cfg) {
    std::vector<DroneState> states;
    states.reserve(static_cast<std::size_t>(cfg.scenario.n_drones));
    for (int id = 0; id < cfg.scenario.n_drones; ++id) {
        DroneState st;
        st.id = id;
        st.plan = gen_plan(cfg.scenario, id);
        st.position = st.plan.waypoints.front();
        states.push_back(std::move(st));
    }
    return states;
}

// Nominal advance toward dest by at most `arc`; lands exactly on dest when the
// remaining distance fits in this step. Returns the new position and whether
// the destination was reached.
inline std::pair<Vec3, bool> advance_nominal(const Vec3& pos, const Vec3& dest, double arc,
                                             double radius) {
    const double remaining = gc_distance(pos, dest, radius);
    if (remaining <= arc * (1.0 + 1e-9)) {
        return {dest, true};
    }
    return {step_along(pos, tangent_dir(pos, dest), arc, radius), false};
}

// Advance every unfinished drone by one step. Decisions for all drones read
// the same start-of-step snapshot; positions commit afterwards.
inline void step(std::vector<DroneState>& states, int t, const SimConfig& cfg) {
    Snapshot snap;
    snap.reserve(states.size());
    for (const DroneState& st : states) {
        if (!st.finished) snap.push_back({st.id, st.position});
    }

    const double arc = cfg.cruise_speed * cfg.dt;
    const double h_hat = cfg.control.safe_spacing;
    const double sensing = effective_sensing_radius(cfg.control);

    for (DroneState& st : states) {
        if (st.finished) continue;
        try {
            const Vec3 dest = st.destination();
            const std::vector<int> conflicts = detect_conflicts(st.id, snap, h_hat);

            Vec3 new_pos = st.position;
            bool arrived = false;
            if (conflicts.empty()) {
                std::tie(new_pos, arrived) =
                    detail::advance_nominal(st.position, dest, arc, cfg.radius);
            } else if (cfg.control.law == ControlLaw::StopAndYield) {
                const ControlDecision dec = stop_yield(st.id, conflicts, snap, dest);
                if (!dec.is_halt()) {
                    std::tie(new_pos, arrived) =
                        detail::advance_nominal(st.position, dest, arc, cfg.radius);
                }
            } else {
                const std::vector<int> constraints =
                    sensing == h_hat ? conflicts : detect_conflicts(st.id, snap, sensing);
                const ControlDecision dec =
                    circular_detour(st.id, constraints, snap, dest, cfg.control.n_candidates);
                if (!dec.is_halt()) {
                    new_pos = step_along(st.position, dec.direction, arc, cfg.radius);
                }
            }

            st.position = new_pos;
            if (arrived) {
                ++st.current_leg;
                if (st.current_leg >= st.plan.leg_count()) st.finished = true;
            }
        } catch (const GeometryError& e) {
            throw GeometryError("drone " + std::to_string(st.id) + " at step " +
                                std::to_string(t) + ": " + e.what());
        }
    }
}

// Run the full simulation, emitting one record per active drone at each
// sampling instant t = 0..T (time-major order).
inline std::vector<TrajectoryRecord> run(const SimConfig& cfg) {
    validate(cfg);
    std::vector<DroneState> states = init_states(cfg);

    std::vector<TrajectoryRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.n_steps + 1) * states.size());
    for (int t = 0; t <= cfg.n_steps; ++t) {
        for (const DroneState& st : states) {
            if (st.finished) continue;
            records.push_back({st.id, t * cfg.dt, st.position, st.destination()});
        }
        if (t < cfg.n_steps) step(states, t, cfg);
    }
    return records;
}

} // namespace aeroflow
