#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "aeroflow/geometry.hpp"
#include "test_util.hpp"

using namespace aeroflow;
using Catch::Matchers::WithinAbs;

TEST_CASE("gc_distance on known configurations") {
    const Vec3 pole{0, 0, 1};
    const Vec3 ex{1, 0, 0};

    CHECK(gc_distance(pole, pole, 1.0) == 0.0);
    CHECK_THAT(gc_distance(pole, ex, 1.0), WithinAbs(kPi / 2.0, 1e-12));

    // Equatorial arc of 0.3 rad; oracle is acos of the dot product.
    const Vec3 p2{std::cos(0.3), std::sin(0.3), 0.0};
    const double expected = std::acos(ex.dot(p2));
    CHECK_THAT(gc_distance(ex, p2, 1.0), WithinAbs(0.3, 1e-12));
    CHECK_THAT(gc_distance(ex, p2, 1.0), WithinAbs(expected, 1e-12));
    CHECK(gc_distance(ex, p2, 1.0) == gc_distance(p2, ex, 1.0));
}

TEST_CASE("gc_distance input validation") {
    const Vec3 ok{1, 0, 0};
    CHECK_THROWS_AS(gc_distance({1.01, 0, 0}, ok, 1.0), GeometryError); // off sphere > 1e-6
    CHECK_THROWS_AS(gc_distance({std::nan(""), 0, 0}, ok, 1.0), GeometryError);
    CHECK_NOTHROW(gc_distance({1.0 + 5e-7, 0, 0}, ok, 1.0)); // inside input tolerance
}

TEST_CASE("slerp endpoints and midpoints") {
    const Vec3 a{1, 0, 0};
    const Vec3 b{0, 1, 0};
    CHECK(slerp(a, b, 0.0) == a);
    CHECK(slerp(a, b, 1.0) == b);

    const Vec3 mid = slerp(a, b, 0.5);
    CHECK_THAT(mid.x, WithinAbs(std::sqrt(2.0) / 2.0, 1e-15));
    CHECK_THAT(mid.y, WithinAbs(std::sqrt(2.0) / 2.0, 1e-15));
    CHECK_THAT(mid.z, WithinAbs(0.0, 1e-15));

    // Quarter of the pole->equator arc is a pi/8 rotation in the xz-plane.
    const Vec3 q = slerp({0, 0, 1}, {1, 0, 0}, 0.25);
    CHECK_THAT(q.x, WithinAbs(std::sin(kPi / 8.0), 1e-15));
    CHECK_THAT(q.y, WithinAbs(0.0, 1e-15));
    CHECK_THAT(q.z, WithinAbs(std::cos(kPi / 8.0), 1e-15));
}

TEST_CASE("slerp rejects antipodal endpoints and bad parameters") {
    const Vec3 a{1, 0, 0};
    CHECK_THROWS_AS(slerp(a, {-1, 0, 0}, 0.5), GeometryError);
    CHECK_THROWS_AS(slerp(a, {0, 1, 0}, -0.1), GeometryError);
    CHECK_THROWS_AS(slerp(a, {0, 1, 0}, 1.1), GeometryError);
}

TEST_CASE("slerp arc-length proportionality on random pairs") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 2000; ++i) {
        const auto [a, b] = testutil::random_nondegenerate_pair(rng);
        const double ell = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Vec3 p = slerp(a, b, ell);
        CHECK_THAT(p.norm(), WithinAbs(1.0, 1e-9));
        CHECK_THAT(gc_distance(a, p, 1.0), WithinAbs(ell * gc_distance(a, b, 1.0), 1e-9));
    }
}

TEST_CASE("tangent_dir on known configurations") {
    const Vec3 ex{1, 0, 0};
    const Vec3 ey{0, 1, 0};

    Vec3 d = tangent_dir(ex, ey);
    CHECK_THAT(d.x, WithinAbs(0.0, 1e-15));
    CHECK_THAT(d.y, WithinAbs(1.0, 1e-15));

    d = tangent_dir({0, 0, 1}, ex);
    CHECK_THAT(d.x, WithinAbs(1.0, 1e-15));
    CHECK_THAT(d.z, WithinAbs(0.0, 1e-15));

    // Equatorial motion: oracle is normalize(p2 - (p2.p1) p1).
    const Vec3 p2{std::cos(0.3), std::sin(0.3), 0.0};
    const Vec3 oracle = (p2 - ex * p2.dot(ex)).normalized();
    d = tangent_dir(ex, p2);
    CHECK_THAT(d.x, WithinAbs(oracle.x, 1e-12));
    CHECK_THAT(d.y, WithinAbs(oracle.y, 1e-12));
    CHECK_THAT((d - Vec3{0, 1, 0}).norm(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("tangent_dir degeneracies and contracts") {
    const Vec3 ex{1, 0, 0};
    CHECK_THROWS_AS(tangent_dir(ex, ex), GeometryError);
    CHECK_THROWS_AS(tangent_dir(ex, {-1, 0, 0}), GeometryError);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto [a, b] = testutil::random_nondegenerate_pair(rng);
        const Vec3 d = tangent_dir(a, b);
        CHECK_THAT(d.norm(), WithinAbs(1.0, 1e-12));
        CHECK(std::abs(d.dot(a)) <= 1e-9);     // tangent at a
        CHECK(d.dot(b - a) > 0.0);             // points toward b
    }
}

TEST_CASE("rodrigues_rotate on known configurations") {
    const Vec3 ey{0, 1, 0};
    const Vec3 ez{0, 0, 1};

    Vec3 r = rodrigues_rotate(ey, ez, kPi / 2.0);
    CHECK_THAT(r.x, WithinAbs(-1.0, 1e-12));
    CHECK_THAT(r.y, WithinAbs(0.0, 1e-12));

    r = rodrigues_rotate(ey, ez, 2.0 * kPi);
    CHECK_THAT((r - ey).norm(), WithinAbs(0.0, 1e-12));

    r = rodrigues_rotate({1, 0, 0}, ez, 0.7);
    CHECK_THAT(r.x, WithinAbs(std::cos(0.7), 1e-15));
    CHECK_THAT(r.y, WithinAbs(std::sin(0.7), 1e-15));

    CHECK(rodrigues_rotate(ey, ez, 0.0) == ey); // psi = 0 is the identity
}

TEST_CASE("rodrigues_rotate norm preservation and composition") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 axis = testutil::random_on_sphere(rng);
        Vec3 d = testutil::random_on_sphere(rng);
        const double p1 = angle(rng);
        const double p2 = angle(rng);
        const Vec3 once = rodrigues_rotate(rodrigues_rotate(d, axis, p1), axis, p2);
        const Vec3 both = rodrigues_rotate(d, axis, p1 + p2);
        CHECK_THAT(rodrigues_rotate(d, axis, p1).norm(), WithinAbs(1.0, 1e-12));
        CHECK_THAT((once - both).norm(), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("spherical coordinate conversions") {
    SphericalCoord c = to_spherical({0, 0, 1});
    CHECK(c.theta == 0.0);
    CHECK(c.phi == 0.0);

    c = to_spherical({1, 0, 0});
    CHECK_THAT(c.theta, WithinAbs(kPi / 2.0, 1e-15));
    CHECK(c.phi == 0.0);

    // atan2 branch: negative y folds into [0, 2*pi).
    c = to_spherical({0, -1, 0});
    CHECK_THAT(c.theta, WithinAbs(kPi / 2.0, 1e-15));
    CHECK_THAT(c.phi, WithinAbs(3.0 * kPi / 2.0, 1e-15));

    CHECK(to_spherical({0, 0, -1}).phi == 0.0); // south pole is canonical too

    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = testutil::random_on_sphere(rng, 2.5);
        const Vec3 back = from_spherical(to_spherical(p), 2.5);
        CHECK_THAT((back - p).norm(), WithinAbs(0.0, 1e-9 * 2.5));
    }
}

TEST_CASE("step_along on known configurations") {
    const Vec3 ex{1, 0, 0};
    const Vec3 ey{0, 1, 0};

    Vec3 p = step_along(ex, ey, kPi / 2.0, 1.0);
    CHECK_THAT((p - ey).norm(), WithinAbs(0.0, 1e-12));

    CHECK(step_along(ex, ey, 0.0, 1.0) == ex);

    p = step_along({0, 0, 1}, {1, 0, 0}, 0.05, 1.0);
    CHECK_THAT(p.x, WithinAbs(std::sin(0.05), 1e-15));
    CHECK_THAT(p.z, WithinAbs(std::cos(0.05), 1e-15));

    CHECK_THROWS_AS(step_along(ex, ey, -0.01, 1.0), GeometryError);
    CHECK_THROWS_AS(step_along(ex, ex, 0.1, 1.0), GeometryError); // not tangent
}

TEST_CASE("step_along advances by the exact arc") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> arc(0.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const auto [a, b] = testutil::random_nondegenerate_pair(rng);
        const Vec3 dir = tangent_dir(a, b);
        const double s = arc(rng);
        const Vec3 p = step_along(a, dir, s, 1.0);
        CHECK_THAT(p.norm(), WithinAbs(1.0, 1e-9));
        CHECK_THAT(gc_distance(a, p, 1.0), WithinAbs(s, 1e-9));
    }
}

TEST_CASE("gc_distance triangle inequality on random triples") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 a = testutil::random_on_sphere(rng);
        const Vec3 b = testutil::random_on_sphere(rng);
        const Vec3 c = testutil::random_on_sphere(rng);
        CHECK(gc_distance(a, c, 1.0) <=
              gc_distance(a, b, 1.0) + gc_distance(b, c, 1.0) + 1e-9);
    }
}

TEST_CASE("rotating a tangent about the outward normal keeps it tangent") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int i = 0; i < 2000; ++i) {
        const auto [a, b] = testutil::random_nondegenerate_pair(rng);
        const Vec3 d = tangent_dir(a, b);
        const Vec3 rotated = rodrigues_rotate(d, a.normalized(), angle(rng));
        CHECK(std::abs(rotated.dot(a)) <= 1e-9);
    }
}
