#pragma once

#include <random>

#include "aeroflow/scenario.hpp"
#include "aeroflow/vec3.hpp"

// Shared generators for randomized tests.

namespace aeroflow::testutil {

inline Vec3 random_on_sphere(std::mt19937_64& rng, double radius = 1.0) {
    return sample_uniform_sphere(rng, radius);
}

// A pair with central angle comfortably inside (0, pi).
inline std::pair<Vec3, Vec3> random_nondegenerate_pair(std::mt19937_64& rng,
                                                       double radius = 1.0) {
    for (;;) {
        const Vec3 a = random_on_sphere(rng, radius);
        const Vec3 b = random_on_sphere(rng, radius);
        const double angle = angle_between(a, b);
        if (angle > 1e-3 && angle < kPi - 1e-3) return {a, b};
    }
}

} // namespace aeroflow::testutil
