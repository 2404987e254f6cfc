#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aeroflow/error.hpp"
#include "aeroflow/vec3.hpp"

// Exact spherical geometry primitives shared by traffic generation, control
// laws, and flow measurement. All functions are pure.

namespace aeroflow {

inline constexpr double kPi = std::numbers::pi;

// Input tolerance accepts accumulated drift; output tolerance is what freshly
// produced points must satisfy.
inline constexpr double kOnSphereInputTol = 1e-6;
inline constexpr double kOnSphereOutputTol = 1e-9;

// Pairs closer than this angle (rad) to pi are treated as antipodal: the
// great circle through them is not unique.
inline constexpr double kAntipodalAngleTol = 1e-6;

struct SphericalCoord {
    double theta = 0.0; // polar angle, [0, pi]
    double phi = 0.0;   // azimuth, [0, 2*pi)
};

inline void require_on_sphere(const Vec3& p, double radius, const char* what,
                              double rel_tol = kOnSphereInputTol) {
    if (!p.finite() || !std::isfinite(radius) || radius <= 0.0) {
        throw GeometryError(std::string(what) + ": non-finite input");
    }
    if (std::abs(p.norm() - radius) > rel_tol * radius) {
        throw GeometryError(std::string(what) + ": point is off the sphere (|p| = " +
                            std::to_string(p.norm()) + ", R = " + std::to_string(radius) + ")");
    }
}

// Central angle between two directions, robust near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
    const Vec3 u = a.normalized();
    const Vec3 v = b.normalized();
    return std::atan2(cross(u, v).norm(), dot(u, v));
}

// Great-circle distance between two on-sphere points. Symmetric, in [0, pi*R].
inline double gc_distance(const Vec3& p1, const Vec3& p2, double radius) {
    require_on_sphere(p1, radius, "gc_distance");
    require_on_sphere(p2, radius, "gc_distance");
    return radius * angle_between(p1, p2);
}

// Spherical linear interpolation along the unique great-circle arc from p1 to
// p2. Endpoints are returned exactly; antipodal pairs are rejected.
inline Vec3 slerp(const Vec3& p1, const Vec3& p2, double ell) {
    const double radius = p1.norm();
    require_on_sphere(p1, radius, "slerp");
    require_on_sphere(p2, radius, "slerp");
    if (!(ell >= 0.0 && ell <= 1.0)) {
        throw GeometryError("slerp: interpolation parameter " + std::to_string(ell) +
                            " outside [0, 1]");
    }
    if (ell == 0.0) return p1;
    if (ell == 1.0) return p2;

    const double omega = angle_between(p1, p2);
    if (omega > kPi - kAntipodalAngleTol) {
        throw GeometryError("slerp: antipodal endpoints, great circle not unique");
    }
    if (omega < 1e-15) return p1;

    const double s = std::sin(omega);
    return p1 * (std::sin((1.0 - ell) * omega) / s) + p2 * (std::sin(ell * omega) / s);
}

// Unit tangent at p1 pointing along the great circle toward p2.
inline Vec3 tangent_dir(const Vec3& p1, const Vec3& p2) {
    const double radius = p1.norm();
    require_on_sphere(p1, radius, "tangent_dir");
    require_on_sphere(p2, radius, "tangent_dir");

    const double omega = angle_between(p1, p2);
    if (omega < 1e-12) {
        throw GeometryError("tangent_dir: coincident points");
    }
    if (omega > kPi - kAntipodalAngleTol) {
        throw GeometryError("tangent_dir: antipodal points, direction not unique");
    }
    const Vec3 n = p1.normalized();
    const Vec3 w = p2 - n * dot(p2, n); // p2 minus its radial component at p1
    return w.normalized();
}

// Rotate direction d by angle psi about a unit axis.
inline Vec3 rodrigues_rotate(const Vec3& d, const Vec3& axis, double psi) {
    if (!d.finite() || !axis.finite() || !std::isfinite(psi)) {
        throw GeometryError("rodrigues_rotate: non-finite input");
    }
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    return d * c + cross(axis, d) * s + axis * (dot(axis, d) * (1.0 - c));
}

// Polar/azimuth angles of a point. At the poles phi is undefined and comes
// out as 0 (atan2(0, 0) = 0).
inline SphericalCoord to_spherical(const Vec3& p) {
    if (!p.finite() || p.norm2() == 0.0) {
        throw GeometryError("to_spherical: non-finite or zero-length point");
    }
    const double r = p.norm();
    double cz = p.z / r;
    cz = std::clamp(cz, -1.0, 1.0);
    double phi = std::atan2(p.y, p.x);
    if (phi < 0.0) phi += 2.0 * kPi;
    if (phi >= 2.0 * kPi) phi = 0.0;
    return {std::acos(cz), phi};
}

inline Vec3 from_spherical(const SphericalCoord& c, double radius) {
    if (!std::isfinite(c.theta) || !std::isfinite(c.phi) || radius <= 0.0) {
        throw GeometryError("from_spherical: invalid input");
    }
    const double st = std::sin(c.theta);
    return {radius * st * std::cos(c.phi), radius * st * std::sin(c.phi),
            radius * std::cos(c.theta)};
}

// Advance a point by an exact arc length along the great circle tangent to
// `dir`: p*cos(arc/R) + dir*R*sin(arc/R). Keeps the result on the sphere.
inline Vec3 step_along(const Vec3& p, const Vec3& dir, double arc, double radius) {
    require_on_sphere(p, radius, "step_along");
    if (!dir.finite() || !std::isfinite(arc)) {
        throw GeometryError("step_along: non-finite input");
    }
    if (arc < 0.0) {
        throw GeometryError("step_along: negative arc length");
    }
    if (std::abs(dot(dir, p)) > kOnSphereInputTol * radius) {
        throw GeometryError("step_along: direction is not tangent at p");
    }
    if (arc == 0.0) return p;
    const double a = arc / radius;
    return p * std::cos(a) + dir * (radius * std::sin(a));
}

} // namespace aeroflow
