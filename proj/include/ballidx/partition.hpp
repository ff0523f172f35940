#pragma once

#include <vector>

#include "ballidx/metric.hpp"

namespace ballidx {

/// A ball-shaped group of objects: centroid pivot plus covering radius.
struct Partition {
    int id = 0;
    std::vector<ObjectId> members;
    Point pivot;
    double radius = 0.0;
};

/// Builds a partition whose pivot is the centroid of members and whose radius
/// is the largest member distance to it (0 for a singleton).
Partition make_partition(int id, std::vector<ObjectId> members, const Dataset& ds, const DistanceFn& fn,
                         CostCounters& counters);

/// Recomputes pivot and radius of an existing partition in place.
void refit(Partition& part, const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

} // namespace ballidx
