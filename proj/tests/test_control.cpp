#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "aeroflow/control.hpp"
#include "test_util.hpp"

using namespace aeroflow;
using Catch::Matchers::WithinAbs;

namespace {

// Places a drone at chord distance `chord` from p along the tangent toward
// `toward`, staying on the unit sphere.
Vec3 offset_on_sphere(const Vec3& p, const Vec3& toward, double chord) {
    const double arc = 2.0 * std::asin(chord / 2.0);
    return step_along(p, tangent_dir(p, toward), arc, 1.0);
}

} // namespace

TEST_CASE("detect_conflicts uses inclusive chord spacing") {
    const Vec3 p0{1, 0, 0};
    const Vec3 p1 = offset_on_sphere(p0, {0, 1, 0}, 0.4);
    const double h_exact = chord_distance(p0, p1); // conflict boundary, inclusive

    Snapshot snap{{0, p0}, {1, p1}};
    CHECK(detect_conflicts(0, snap, h_exact) == std::vector<int>{1});
    CHECK(detect_conflicts(1, snap, h_exact) == std::vector<int>{0});
    CHECK(detect_conflicts(0, snap, h_exact * 0.999).empty());

    Snapshot alone{{0, p0}};
    CHECK(detect_conflicts(0, alone, 1.0).empty());
}

TEST_CASE("detect_conflicts sees every neighbor inside the spacing") {
    const Vec3 p0{1, 0, 0};
    const double h_hat = 0.5;
    const Vec3 p1 = offset_on_sphere(p0, {0, 1, 0}, 0.9 * h_hat);
    const Vec3 p2 = offset_on_sphere(p0, {0, 0, 1}, 0.9 * h_hat);
    Snapshot snap{{0, p0}, {1, p1}, {2, p2}};
    // All three pairwise within h_hat?  p1-p2 may not be; check i=0 only plus
    // symmetry of the relation.
    CHECK(detect_conflicts(0, snap, h_hat) == std::vector<int>{1, 2});
    for (int j : detect_conflicts(1, snap, h_hat)) {
        auto back = detect_conflicts(j, snap, h_hat);
        CHECK(std::find(back.begin(), back.end(), 1) != back.end());
    }
}

TEST_CASE("stop_yield yields exactly to higher-priority drones") {
    const Vec3 p{1, 0, 0};
    const Vec3 dest{0, 1, 0};
    Snapshot snap{{1, p}, {2, p}, {3, p}, {5, p}};

    CHECK(stop_yield(3, std::vector<int>{1}, snap, dest).is_halt());
    const ControlDecision go = stop_yield(1, std::vector<int>{3}, snap, dest);
    CHECK_FALSE(go.is_halt());
    CHECK(go.direction == tangent_dir(p, dest)); // nominal heading
    CHECK(stop_yield(2, std::vector<int>{1, 5}, snap, dest).is_halt());
    CHECK_FALSE(stop_yield(2, std::vector<int>{3, 5}, snap, dest).is_halt());
}

TEST_CASE("top-priority drone never halts under stop_yield") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        Snapshot snap;
        for (int id = 0; id < 6; ++id) {
            snap.push_back({id, testutil::random_on_sphere(rng)});
        }
        const auto conflicts = detect_conflicts(0, snap, 2.0); // everyone conflicts
        Vec3 dest;
        do {
            dest = testutil::random_on_sphere(rng);
        } while (angle_between(snap[0].position, dest) < 1e-3 ||
                 angle_between(snap[0].position, dest) > kPi - 1e-3);
        CHECK_FALSE(stop_yield(0, conflicts, snap, dest).is_halt());
    }
}

TEST_CASE("circular_detour avoids a conflict straight ahead") {
    const Vec3 p{1, 0, 0};
    const Vec3 dest{0, 1, 0}; // nominal heading +y
    const Vec3 ahead = offset_on_sphere(p, dest, 0.3);
    Snapshot snap{{0, p}, {1, ahead}};
    const std::vector<int> conflicts{1};

    const int n_candidates = 64;
    const ControlDecision dec = circular_detour(0, conflicts, snap, dest, n_candidates);
    REQUIRE_FALSE(dec.is_halt());

    const Vec3 toward = tangent_dir(p, ahead);
    CHECK(dec.direction.dot(toward) <= 0.0); // never approaches the conflict

    // Independent re-scan: the chosen angle must beat every other safe
    // candidate on alignment with the nominal heading.
    const Vec3 nominal = tangent_dir(p, dest);
    const Vec3 axis = p.normalized();
    double best = -2.0;
    double best_psi = 0.0;
    for (int s = 1; s <= n_candidates; ++s) {
        const double psi = 2.0 * kPi * s / (n_candidates + 1);
        const Vec3 r = rodrigues_rotate(nominal, axis, psi).normalized();
        if (r.dot(toward) > 0.0) continue;
        if (r.dot(nominal) > best) {
            best = r.dot(nominal);
            best_psi = psi;
        }
    }
    CHECK_THAT(dec.direction.dot(nominal), WithinAbs(best, 1e-15));
    // With the obstacle dead ahead the best safe deviation is the sampled
    // angle closest to +-pi/2.
    const double dev = std::min(std::abs(best_psi - kPi / 2.0),
                                std::abs(best_psi - 3.0 * kPi / 2.0));
    CHECK(dev <= kPi / (n_candidates + 1));
}

TEST_CASE("circular_detour passes nearly straight when the conflict is behind") {
    const Vec3 p{1, 0, 0};
    const Vec3 dest{0, 1, 0};
    const Vec3 behind = offset_on_sphere(p, Vec3{0, -1, 0}, 0.3);
    Snapshot snap{{0, p}, {1, behind}};

    const int n_candidates = 64;
    const ControlDecision dec =
        circular_detour(0, std::vector<int>{1}, snap, dest, n_candidates);
    REQUIRE_FALSE(dec.is_halt());
    const Vec3 nominal = tangent_dir(p, dest);
    // Candidates nearest 0 and 2*pi are safe; alignment approaches 1.
    CHECK(dec.direction.dot(nominal) >=
          std::cos(2.0 * kPi / (n_candidates + 1)) - 1e-12);
}

TEST_CASE("head-on drones both keep moving under circular_detour") {
    const Vec3 p0{1, 0, 0};
    const Vec3 p1 = offset_on_sphere(p0, {0, 1, 0}, 0.3);
    Snapshot snap{{0, p0}, {1, p1}};
    // Drone 0 heads +y toward drone 1's side; drone 1 heads back toward 0.
    const Vec3 dest0{0, 1, 0};
    const Vec3 dest1{0, -1, 0};

    const ControlDecision d0 = circular_detour(0, std::vector<int>{1}, snap, dest0, 64);
    const ControlDecision d1 = circular_detour(1, std::vector<int>{0}, snap, dest1, 64);
    CHECK_FALSE(d0.is_halt());
    CHECK_FALSE(d1.is_halt());
}

TEST_CASE("circular_detour halts when surrounded") {
    const Vec3 p{0, 0, 1};
    // Three conflicts arranged 120 degrees apart around the drone: their
    // tangent directions span the plane, so no candidate is safe.
    Snapshot snap{{0, p}};
    for (int k = 0; k < 3; ++k) {
        const double ang = 2.0 * kPi * k / 3.0;
        const Vec3 dir{std::cos(ang), std::sin(ang), 0.0};
        snap.push_back({k + 1, step_along(p, dir, 0.2, 1.0)});
    }
    const ControlDecision dec =
        circular_detour(0, std::vector<int>{1, 2, 3}, snap, {1, 0, 0}, 64);
    CHECK(dec.is_halt());
}

TEST_CASE("proceed directions are tangent and safe on random configurations") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 500; ++trial) {
        Snapshot snap;
        const Vec3 p = testutil::random_on_sphere(rng);
        snap.push_back({0, p});
        const int n_conf = 1 + static_cast<int>(rng() % 3);
        std::vector<int> conflicts;
        for (int j = 1; j <= n_conf; ++j) {
            const Vec3 q = testutil::random_on_sphere(rng);
            if (angle_between(p, q) < 1e-3 || angle_between(p, q) > kPi - 1e-3) continue;
            const double chord = 0.05 + 0.4 * std::uniform_real_distribution<>(0, 1)(rng);
            snap.push_back({j, offset_on_sphere(p, q, chord)});
            conflicts.push_back(j);
        }
        if (conflicts.empty()) continue;
        const auto [a, b] = testutil::random_nondegenerate_pair(rng);
        const Vec3 dest = angle_between(p, a) > 1e-3 && angle_between(p, a) < kPi - 1e-3
                              ? a
                              : b;
        if (angle_between(p, dest) < 1e-3 || angle_between(p, dest) > kPi - 1e-3) continue;

        const ControlDecision dec = circular_detour(0, conflicts, snap, dest, 32);
        if (dec.is_halt()) continue;
        CHECK(std::abs(dec.direction.dot(p)) <= 1e-9); // tangent at p
        CHECK_THAT(dec.direction.norm(), WithinAbs(1.0, 1e-12));
        for (int j : conflicts) {
            CHECK(dec.direction.dot(tangent_dir(p, snapshot_position(snap, j))) <= 0.0);
        }
    }
}

TEST_CASE("control config validation") {
    ControlConfig cfg;
    cfg.safe_spacing = -0.1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.safe_spacing = 0.5;
    cfg.n_candidates = 3;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.n_candidates = 64;
    CHECK_NOTHROW(validate(cfg));
    CHECK(effective_sensing_radius(cfg) == 0.5);
    cfg.sensing_radius = 0.8;
    CHECK(effective_sensing_radius(cfg) == 0.8);
}
