#pragma once

#include <algorithm>
#include <vector>

#include "aeroflow/vec3.hpp"

namespace aeroflow {

// One row of the trajectory CSV schema: a drone's position and its current
// destination at one sampling instant.
struct TrajectoryRecord {
    int id = 0;
    double time = 0.0; // seconds, multiple of the sampling interval
    Vec3 position;
    Vec3 destination;

    bool operator==(const TrajectoryRecord&) const = default;
};

// Records come off the simulator time-major; measurement wants them grouped
// by drone.
inline std::vector<TrajectoryRecord> sorted_by_drone(std::vector<TrajectoryRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                         if (a.id != b.id) return a.id < b.id;
                         return a.time < b.time;
                     });
    return records;
}

} // namespace aeroflow
