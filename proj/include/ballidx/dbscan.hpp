#pragma once

#include <cstddef>
#include <vector>

#include "ballidx/metric.hpp"
#include "ballidx/partition.hpp"

namespace ballidx {

struct DbscanParams {
    double epsilon = 0.0;
    std::size_t min_pts = 1;

    /// Throws a config error unless epsilon > 0 and min_pts >= 1.
    void validate() const;
};

/// Cluster label of noise objects. Clusters are labelled 1, 2, ... in the
/// order they are discovered.
inline constexpr int kNoise = 0;

struct DbscanResult {
    std::vector<Partition> partitions;  ///< ordered by cluster id
    std::vector<ObjectId> noise_ids;    ///< ascending
    std::vector<int> labels;            ///< per object: cluster id or kNoise
};

/// All objects q with d(o, q) <= eps, o itself included, in ascending id order.
/// Linear scan: exactly |ds| distance evaluations.
std::vector<ObjectId> epsilon_neighborhood(const ObjectView& o, const Dataset& ds, double eps, const DistanceFn& fn,
                                           CostCounters& counters);

/// Density clustering followed by pivot (centroid) and radius extraction for
/// every cluster. Objects are visited in ascending id order and seeds are
/// expanded first-in first-out, which fixes border-point assignment.
DbscanResult run_dbscan(const Dataset& ds, const DbscanParams& params, const DistanceFn& fn, CostCounters& counters);

/// Routes each noise object to the partition with the nearest pivot and refits
/// the touched partitions. With no partitions at all, the noise becomes one
/// fallback partition. Afterwards every object belongs to exactly one partition.
std::vector<Partition> absorb_noise(std::vector<Partition> partitions, const std::vector<ObjectId>& noise_ids,
                                    const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

} // namespace ballidx
