#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "ballidx/geometry.hpp"
#include "ballidx/metric.hpp"
#include "ballidx/partition.hpp"

namespace ballidx {

/// Overlap thresholds splitting rates into Low [0, xi_min), Medium
/// [xi_min, xi_max) and High [xi_max, 1].
struct Thresholds {
    double xi_min = 0.4;
    double xi_max = 0.8;

    /// Throws a config error unless 0 <= xi_min <= xi_max <= 1.
    void validate() const;
};

enum class OverlapLevel { Low, Medium, High };

std::string_view to_string(OverlapLevel level) noexcept;

OverlapLevel classify(double rate, const Thresholds& th) noexcept;

enum class GroupKind { Cluster, OverlapBridge };

std::string_view to_string(GroupKind kind) noexcept;

struct IndexGroup {
    std::vector<ObjectId> members;  ///< ascending
    Point center;                   ///< centroid of members
    double radius = 0.0;            ///< max member distance to center
    GroupKind kind = GroupKind::Cluster;
};

/// What the planner saw and did; serialised into the stats report.
struct PlanSummary {
    std::size_t input_partitions = 0;

    // Scores of the initial partition pairs.
    std::size_t pairs_scored = 0;
    std::size_t low_pairs = 0;
    std::size_t medium_pairs = 0;
    std::size_t high_pairs = 0;
    std::size_t disjoint_pairs = 0;
    std::size_t partial_pairs = 0;
    std::size_t containment_pairs = 0;

    // Structural changes over all rounds.
    std::size_t merges = 0;  ///< groups absorbed into another
    std::size_t transfers = 0;
    std::size_t objects_transferred = 0;
    std::size_t bridges = 0;
    std::size_t objects_bridged = 0;
    std::size_t folded_bridges = 0;  ///< bridges left with fewer than two parents
    std::size_t dropped_groups = 0;
    std::size_t rounds = 0;
    bool round_cap_hit = false;

    std::size_t neighbor_edges = 0;
};

/// The counters of PlanSummary by name, in declaration order.
const std::vector<std::pair<std::string_view, std::size_t PlanSummary::*>>& plan_summary_fields();

/// Final index layout: disjoint groups covering the dataset plus a symmetric
/// neighbour relation (indices into groups, ascending).
struct IndexPlan {
    std::vector<IndexGroup> groups;
    std::vector<std::vector<std::size_t>> neighbors;
    PlanSummary summary;
};

/// Scores one pair of partitions with the given heuristic. Costs one distance
/// evaluation for the pivot distance, plus the OBM membership tests.
OverlapReport score_pair(OverlapMethod method, const Dataset& ds, const Partition& a, const Partition& b,
                         const DistanceFn& fn, CostCounters& counters);

/// Reorganises partitions by overlap level:
///  - High pairs are merged transitively, repeated until no High pair is left;
///  - Medium pairs hand the objects lying in both balls to a new bridge group
///    that becomes a neighbour of both parents;
///  - Low pairs in partial overlap move the overlap-region objects of the
///    parent with the smaller cap height into the other parent.
/// Pairs are visited in descending rate (ties by group ids) and rescored on the
/// current balls right before acting. Each pair acts at most once at Medium or
/// Low level, bridges never participate again, and rounds repeat until nothing
/// changes or ten rounds have run.
IndexPlan plan_indexes(const std::vector<Partition>& partitions, OverlapMethod method, const Thresholds& th,
                       const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

/// One Cluster group holding the whole dataset.
IndexPlan single_group_plan(const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

} // namespace ballidx
