#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aeroflow/error.hpp"
#include "aeroflow/format.hpp"
#include "aeroflow/geometry.hpp"
#include "aeroflow/vec3.hpp"

// Demand generation: OD flight plans for the three demand-distribution
// scenarios, plus the great-circle leg discretization used to turn a plan
// into a waypoint schedule.

namespace aeroflow {

enum class ScenarioType { Random = 1, Zoned = 2, Stations = 3 };

inline const char* to_string(ScenarioType t) {
    switch (t) {
        case ScenarioType::Random: return "random";
        case ScenarioType::Zoned: return "zoned";
        case ScenarioType::Stations: return "stations";
    }
    return "?";
}

struct ScenarioConfig {
    ScenarioType type = ScenarioType::Random;
    double radius = 1.0;        // sphere radius R, m
    int n_drones = 4;           // fleet size I
    int n_flights = 1000;       // flights per drone N; large so plans outlast the run
    std::uint64_t rng_seed = 0;
    double zone_half_angle = kPi / 3.0; // polar cap half-angle for Zoned
};

inline void validate(const ScenarioConfig& cfg) {
    if (cfg.n_drones < 1) throw ConfigError("scenario: n_drones must be >= 1");
    if (cfg.n_flights < 1) throw ConfigError("scenario: n_flights must be >= 1");
    if (!(cfg.radius > 0.0)) throw ConfigError("scenario: radius must be > 0");
    if (cfg.type == ScenarioType::Zoned &&
        !(cfg.zone_half_angle > 0.0 && cfg.zone_half_angle < kPi / 2.0)) {
        throw ConfigError("scenario: zone_half_angle must lie in (0, pi/2)");
    }
}

struct Leg {
    Vec3 origin;
    Vec3 destination;
};

// Chained OD sequence for one drone: leg n ends exactly where leg n+1 starts,
// so we store the N+1 waypoints once.
struct FlightPlan {
    int drone_id = 0;
    std::vector<Vec3> waypoints;

    std::size_t leg_count() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
    Leg leg(std::size_t n) const { return {waypoints[n], waypoints[n + 1]}; }
};

// Uniform point on the sphere surface via a normalized 3D Gaussian draw.
inline Vec3 sample_uniform_sphere(std::mt19937_64& rng, double radius = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
        const double n = v.norm();
        if (n > 1e-12) return v * (radius / n);
    }
}

// Uniform point in a polar cap of the given half-angle (north pole cap when
// `north`, its antipodal mirror otherwise). Uniform in z within the cap.
inline Vec3 sample_uniform_cap(std::mt19937_64& rng, double radius, double half_angle,
                               bool north) {
    std::uniform_real_distribution<double> uz(std::cos(half_angle), 1.0);
    std::uniform_real_distribution<double> uphi(0.0, 2.0 * kPi);
    const double z = uz(rng);
    const double phi = uphi(rng);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec3 p{rxy * std::cos(phi), rxy * std::sin(phi), z};
    if (!north) p.z = -p.z;
    return p * radius;
}

inline std::vector<Vec3> station_points(double radius) {
    const double c = radius / std::sqrt(3.0);
    std::vector<Vec3> pts;
    pts.reserve(8);
    for (int b = 0; b < 8; ++b) {
        pts.push_back({(b & 1) ? c : -c, (b & 2) ? c : -c, (b & 4) ? c : -c});
    }
    return pts;
}

namespace detail {

inline bool valid_successor(const Vec3& prev, const Vec3& next) {
    const double angle = angle_between(prev, next);
    return angle > 1e-9 && angle < kPi - kAntipodalAngleTol;
}

} // namespace detail

// Generate the chained OD waypoints for one drone. Each drone owns an RNG
// stream seeded from (seed xor drone_id), so plans do not depend on the
// order drones are generated in.
inline FlightPlan gen_plan(const ScenarioConfig& cfg, int drone_id) {
    validate(cfg);
    std::mt19937_64 rng(cfg.rng_seed ^ static_cast<std::uint64_t>(drone_id));

    FlightPlan plan;
    plan.drone_id = drone_id;
    plan.waypoints.reserve(static_cast<std::size_t>(cfg.n_flights) + 1);

    switch (cfg.type) {
        case ScenarioType::Random: {
            plan.waypoints.push_back(sample_uniform_sphere(rng, cfg.radius));
            while (plan.waypoints.size() <= static_cast<std::size_t>(cfg.n_flights)) {
                const Vec3 cand = sample_uniform_sphere(rng, cfg.radius);
                if (detail::valid_successor(plan.waypoints.back(), cand)) {
                    plan.waypoints.push_back(cand);
                }
            }
            break;
        }
        case ScenarioType::Zoned: {
            // Waypoints alternate between the two antipodal caps; drone parity
            // picks the starting cap so the fleet commutes in both directions.
            bool north = (drone_id % 2 == 0);
            plan.waypoints.push_back(
                sample_uniform_cap(rng, cfg.radius, cfg.zone_half_angle, north));
            while (plan.waypoints.size() <= static_cast<std::size_t>(cfg.n_flights)) {
                north = !north;
                const Vec3 cand =
                    sample_uniform_cap(rng, cfg.radius, cfg.zone_half_angle, north);
                if (detail::valid_successor(plan.waypoints.back(), cand)) {
                    plan.waypoints.push_back(cand);
                } else {
                    north = !north; // resample the same cap
                }
            }
            break;
        }
        case ScenarioType::Stations: {
            const std::vector<Vec3> stations = station_points(cfg.radius);
            std::uniform_int_distribution<int> pick(0, 7);
            int prev = pick(rng);
            plan.waypoints.push_back(stations[prev]);
            while (plan.waypoints.size() <= static_cast<std::size_t>(cfg.n_flights)) {
                const int cand = pick(rng);
                // The cube vertex opposite to `prev` is its antipode; both it
                // and `prev` itself would make a degenerate leg.
                if (cand == prev || cand == (prev ^ 7)) continue;
                plan.waypoints.push_back(stations[cand]);
                prev = cand;
            }
            break;
        }
    }
    return plan;
}

// Waypoint schedule along one leg: H = ceil(L / (v*dt)) steps of arc v*dt,
// the last one possibly shorter, ending exactly on the destination.
inline std::vector<Vec3> discretize_leg(const Vec3& origin, const Vec3& destination,
                                        double v_bar, double dt, double radius) {
    if (!(v_bar * dt > 0.0)) throw ConfigError("discretize_leg: v_bar*dt must be > 0");
    const double arc_step = v_bar * dt;
    const double length = gc_distance(origin, destination, radius);
    if (length < 1e-12 * radius) {
        throw GeometryError("discretize_leg: degenerate leg (coincident endpoints)");
    }
    // The -1e-9 guard keeps a ratio that is an integer up to rounding from
    // producing a spurious extra step.
    const auto steps = static_cast<long long>(std::ceil(length / arc_step - 1e-9));
    const long long h_max = std::max(1LL, steps);

    std::vector<Vec3> waypoints;
    waypoints.reserve(static_cast<std::size_t>(h_max) + 1);
    for (long long h = 0; h <= h_max; ++h) {
        const double ell = std::min(static_cast<double>(h) * arc_step / length, 1.0);
        waypoints.push_back(slerp(origin, destination, ell));
    }
    return waypoints;
}

// key=value serialization of a scenario config (one key per line); reals use
// shortest round-trip rendering.
inline std::string to_kv(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "scenario_type = " << static_cast<int>(cfg.type) << "\n"
       << "radius = " << format_double(cfg.radius) << "\n"
       << "n_drones = " << cfg.n_drones << "\n"
       << "n_flights = " << cfg.n_flights << "\n"
       << "rng_seed = " << cfg.rng_seed << "\n"
       << "zone_half_angle = " << format_double(cfg.zone_half_angle) << "\n";
    return os.str();
}

inline ScenarioConfig scenario_from_kv(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("scenario config: missing '=' on line " + std::to_string(lineno));
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        try {
            if (key == "scenario_type") cfg.type = static_cast<ScenarioType>(std::stoi(val));
            else if (key == "radius") cfg.radius = std::stod(val);
            else if (key == "n_drones") cfg.n_drones = std::stoi(val);
            else if (key == "n_flights") cfg.n_flights = std::stoi(val);
            else if (key == "rng_seed") cfg.rng_seed = std::stoull(val);
            else if (key == "zone_half_angle") cfg.zone_half_angle = std::stod(val);
            else throw DataError("scenario config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw DataError("scenario config: bad value for '" + key + "' on line " +
                            std::to_string(lineno));
        }
    }
    validate(cfg);
    return cfg;
}

} // namespace aeroflow
