#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "ballidx/metric.hpp"
#include "ballidx/planner.hpp"

namespace ballidx {

/// One search answer.
struct Hit {
    ObjectId id;
    double distance;

    friend bool operator<(const Hit& a, const Hit& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    }
    friend bool operator==(const Hit&, const Hit&) = default;
};

/// Index of a node inside GhTree::nodes().
using NodeIndex = std::uint32_t;

/// Generalised-hyperplane split: objects nearer `pivot_left` went left. Each
/// radius covers its own child subtree from its own pivot.
struct InternalNode {
    Point pivot_left;
    Point pivot_right;
    double radius_left = 0.0;
    double radius_right = 0.0;
    NodeIndex left = 0;
    NodeIndex right = 0;
};

struct LeafNode {
    std::vector<ObjectId> bucket;
};

using Node = std::variant<InternalNode, LeafNode>;

struct PivotPair {
    ObjectId first;
    ObjectId second;
};

/// Farthest-point heuristic: from the first object find the farthest o_a,
/// from o_a the farthest o_b (ties keep the earlier object). Returns nullopt
/// when every object sits at the same point.
std::optional<PivotPair> select_pivots(std::span<const ObjectId> objects, const Dataset& ds, const DistanceFn& fn,
                                       CostCounters& counters);

struct SplitResult {
    std::vector<ObjectId> left;
    std::vector<ObjectId> right;
    std::vector<double> left_distances;   ///< d(o, p1) for each left object
    std::vector<double> right_distances;  ///< d(o, p2) for each right object
};

/// d(o, p1) <= d(o, p2) goes left, everything else right; ties therefore go
/// left only. Two distance evaluations and one comparison per object.
SplitResult gh_split(std::span<const ObjectId> objects, std::span<const double> p1, std::span<const double> p2,
                     const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

struct SearchOptions {
    bool prune = true;
};

struct TreeStats {
    std::size_t height = 0;  ///< edges on the longest root-leaf path
    std::size_t internal_nodes = 0;
    std::size_t leaves = 0;
    std::size_t oversized_leaves = 0;
    std::map<std::size_t, std::size_t> bucket_histogram;  ///< bucket size -> count
    std::vector<std::size_t> nodes_per_level;
};

struct TreeAudit {
    bool ok = true;
    std::size_t objects_seen = 0;
    std::size_t capacity_violations = 0;  ///< non-degenerate leaves above capacity
    std::size_t radius_violations = 0;
    std::size_t pivot_violations = 0;  ///< internal nodes with coincident pivots
};

/// Binary generalised-hyperplane tree over one index group, with leaf buckets
/// of capacity ceil(sqrt(n)).
class GhTree {
public:
    GhTree() = default;

    /// Builds over the group's members. Leaves that cannot be split (all
    /// points identical, or one side of the split empty) stay oversized and
    /// are counted in stats().oversized_leaves.
    static GhTree build(const IndexGroup& group, const Dataset& ds, const DistanceFn& fn, CostCounters& counters);

    /// Reassembles a tree from stored parts (used by deserialisation).
    static GhTree from_parts(std::vector<Node> nodes, std::size_t size, std::size_t capacity, Point center,
                             double radius, GroupKind kind, std::size_t oversized_leaves);

    /// Greedy descent toward the nearer pivot; returns the k-th smallest
    /// distance among the reached bucket (its largest if the bucket holds
    /// fewer than k objects).
    double estimate_query_radius(const Dataset& ds, std::span<const double> q, std::size_t k, const DistanceFn& fn,
                                 CostCounters& counters) const;

    /// Exact k nearest neighbours among the tree's objects, sorted by
    /// (distance, id). Best-first over lower bounds max(0, d(q, p_i) - r_i);
    /// anything whose bound exceeds the current query radius is pruned. The
    /// query radius starts at r_init; if r_init turns out smaller than the
    /// true k-th distance the search is repeated with an unbounded radius.
    std::vector<Hit> knn_search(const Dataset& ds, std::span<const double> q, std::size_t k, const DistanceFn& fn,
                                CostCounters& counters, double r_init, SearchOptions opts = {}) const;

    TreeStats stats() const;

    /// Walks the whole tree and checks bucket capacity, covering radii (to
    /// 1e-9) and pivot separation. Uses its own counters.
    TreeAudit audit(const Dataset& ds, const DistanceFn& fn) const;

    /// Object ids in leaf order.
    std::vector<ObjectId> members() const;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    GroupKind kind() const noexcept { return kind_; }

private:
    NodeIndex build_node(std::vector<ObjectId> objects, const Dataset& ds, const DistanceFn& fn,
                         CostCounters& counters);
    std::vector<Hit> search_once(const Dataset& ds, std::span<const double> q, std::size_t k, const DistanceFn& fn,
                                 CostCounters& counters, double r_init, SearchOptions opts) const;

    std::vector<Node> nodes_;  // root at index 0
    std::size_t size_ = 0;
    std::size_t capacity_ = 1;
    Point center_;
    double radius_ = 0.0;
    GroupKind kind_ = GroupKind::Cluster;
    std::size_t oversized_leaves_ = 0;
};

/// ceil(sqrt(n)), at least 1.
std::size_t bucket_capacity(std::size_t n) noexcept;

} // namespace ballidx
