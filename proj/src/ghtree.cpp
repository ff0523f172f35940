#include "ballidx/ghtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace ballidx {

std::size_t bucket_capacity(std::size_t n) noexcept {
    if (n <= 1) return 1;
    auto s = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (s * s < n) ++s;
    while (s > 1 && (s - 1) * (s - 1) >= n) --s;
    return s;
}

namespace {

// Farthest object from `from` among `objects`; nullopt if all sit at distance 0.
std::optional<ObjectId> farthest(ObjectId from, std::span<const ObjectId> objects, const Dataset& ds,
                                 const DistanceFn& fn, CostCounters& counters) {
    std::optional<ObjectId> best;
    double best_d = 0.0;
    auto origin = ds.coords(from);
    for (ObjectId id : objects) {
        if (id == from) continue;
        const double d = fn(origin, ds.coords(id), counters);
        if (counters.less(best_d, d)) {
            best_d = d;
            best = id;
        }
    }
    return best;
}

} // namespace

std::optional<PivotPair> select_pivots(std::span<const ObjectId> objects, const Dataset& ds, const DistanceFn& fn,
                                       CostCounters& counters) {
    if (objects.size() < 2) return std::nullopt;
    const ObjectId first = *std::min_element(objects.begin(), objects.end());
    const auto a = farthest(first, objects, ds, fn, counters);
    if (!a) return std::nullopt;
    const auto b = farthest(*a, objects, ds, fn, counters);
    if (!b) return std::nullopt;
    return PivotPair{*a, *b};
}

SplitResult gh_split(std::span<const ObjectId> objects, std::span<const double> p1, std::span<const double> p2,
                     const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    SplitResult out;
    for (ObjectId id : objects) {
        auto o = ds.coords(id);
        const double d1 = fn(o, p1, counters);
        const double d2 = fn(o, p2, counters);
        if (counters.less_equal(d1, d2)) {
            out.left.push_back(id);
            out.left_distances.push_back(d1);
        } else {
            out.right.push_back(id);
            out.right_distances.push_back(d2);
        }
    }
    return out;
}

GhTree GhTree::build(const IndexGroup& group, const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    if (group.members.empty()) throw domain_error("cannot build a tree over an empty group");
    GhTree t;
    t.size_ = group.members.size();
    t.capacity_ = bucket_capacity(t.size_);
    t.center_ = group.center;
    t.radius_ = group.radius;
    t.kind_ = group.kind;
    t.build_node(group.members, ds, fn, counters);
    return t;
}

GhTree GhTree::from_parts(std::vector<Node> nodes, std::size_t size, std::size_t capacity, Point center,
                          double radius, GroupKind kind, std::size_t oversized_leaves) {
    if (nodes.empty()) throw data_error("tree has no nodes");
    // Nodes are stored in pre-order, so children always follow their parent.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (const auto* in = std::get_if<InternalNode>(&nodes[i])) {
            if (in->left <= i || in->right <= i || in->left >= nodes.size() || in->right >= nodes.size())
                throw data_error("tree child index out of range");
        }
    }
    GhTree t;
    t.nodes_ = std::move(nodes);
    t.size_ = size;
    t.capacity_ = capacity;
    t.center_ = std::move(center);
    t.radius_ = radius;
    t.kind_ = kind;
    t.oversized_leaves_ = oversized_leaves;
    return t;
}

NodeIndex GhTree::build_node(std::vector<ObjectId> objects, const Dataset& ds, const DistanceFn& fn,
                             CostCounters& counters) {
    const auto idx = static_cast<NodeIndex>(nodes_.size());
    nodes_.emplace_back(LeafNode{});
    auto make_leaf = [&](bool oversized) {
        if (oversized) ++oversized_leaves_;
        nodes_[idx] = LeafNode{std::move(objects)};
        return idx;
    };

    if (objects.size() <= capacity_) return make_leaf(false);
    const auto pivots = select_pivots(objects, ds, fn, counters);
    if (!pivots) return make_leaf(true);

    InternalNode node;
    node.pivot_left = ds.point(pivots->first);
    node.pivot_right = ds.point(pivots->second);
    SplitResult split = gh_split(objects, node.pivot_left, node.pivot_right, ds, fn, counters);
    if (split.left.empty() || split.right.empty()) return make_leaf(true);

    for (double d : split.left_distances)
        if (counters.less(node.radius_left, d)) node.radius_left = d;
    for (double d : split.right_distances)
        if (counters.less(node.radius_right, d)) node.radius_right = d;
    objects.clear();
    objects.shrink_to_fit();

    node.left = build_node(std::move(split.left), ds, fn, counters);
    node.right = build_node(std::move(split.right), ds, fn, counters);
    nodes_[idx] = std::move(node);
    return idx;
}

double GhTree::estimate_query_radius(const Dataset& ds, std::span<const double> q, std::size_t k,
                                     const DistanceFn& fn, CostCounters& counters) const {
    if (k == 0) throw domain_error("k must be at least 1");
    if (nodes_.empty()) throw domain_error("estimate_query_radius on an empty tree");
    NodeIndex at = 0;
    while (const auto* in = std::get_if<InternalNode>(&nodes_[at])) {
        const double d1 = fn(q, in->pivot_left, counters);
        const double d2 = fn(q, in->pivot_right, counters);
        at = counters.less_equal(d1, d2) ? in->left : in->right;
    }
    const auto& bucket = std::get<LeafNode>(nodes_[at]).bucket;
    if (bucket.empty()) return std::numeric_limits<double>::infinity();

    std::vector<double> dists;
    dists.reserve(bucket.size());
    for (ObjectId id : bucket) dists.push_back(fn(q, ds.coords(id), counters));
    auto cmp = [&](double a, double b) { return counters.less(a, b); };
    if (dists.size() < k) return *std::max_element(dists.begin(), dists.end(), cmp);
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1), dists.end(), cmp);
    return dists[k - 1];
}

std::vector<Hit> GhTree::knn_search(const Dataset& ds, std::span<const double> q, std::size_t k,
                                    const DistanceFn& fn, CostCounters& counters, double r_init,
                                    SearchOptions opts) const {
    if (k == 0) throw domain_error("k must be at least 1");
    if (r_init < 0.0) throw domain_error("initial query radius must be non-negative");
    if (nodes_.empty()) return {};
    auto hits = search_once(ds, q, k, fn, counters, r_init, opts);
    constexpr double kUnbounded = std::numeric_limits<double>::infinity();
    if (hits.size() < std::min(k, size_) && r_init < kUnbounded)
        hits = search_once(ds, q, k, fn, counters, kUnbounded, opts);
    return hits;
}

std::vector<Hit> GhTree::search_once(const Dataset& ds, std::span<const double> q, std::size_t k,
                                     const DistanceFn& fn, CostCounters& counters, double r_init,
                                     SearchOptions opts) const {
    auto worse = [&](const Hit& a, const Hit& b) {
        ++counters.comparison_count;
        return a < b;
    };
    std::priority_queue<Hit, std::vector<Hit>, decltype(worse)> best(worse);  // top = current k-th

    auto query_radius = [&] { return best.size() == k ? best.top().distance : r_init; };
    auto admit = [&](Hit h) {
        if (best.size() < k) {
            if (counters.less_equal(h.distance, r_init)) best.push(h);
        } else if (worse(h, best.top())) {
            best.pop();
            best.push(h);
        }
    };

    struct Pending {
        double bound;
        NodeIndex node;
    };
    auto farther = [&](const Pending& a, const Pending& b) {
        ++counters.comparison_count;
        return a.bound != b.bound ? a.bound > b.bound : a.node > b.node;
    };
    std::priority_queue<Pending, std::vector<Pending>, decltype(farther)> frontier(farther);
    frontier.push({0.0, 0});

    while (!frontier.empty()) {
        const Pending next = frontier.top();
        frontier.pop();
        if (opts.prune && counters.less(query_radius(), next.bound)) break;

        if (const auto* leaf = std::get_if<LeafNode>(&nodes_[next.node])) {
            for (ObjectId id : leaf->bucket) admit({id, fn(q, ds.coords(id), counters)});
            continue;
        }
        const auto& in = std::get<InternalNode>(nodes_[next.node]);
        const double d1 = fn(q, in.pivot_left, counters);
        const double d2 = fn(q, in.pivot_right, counters);
        const double b1 = std::max(next.bound, std::max(0.0, d1 - in.radius_left));
        const double b2 = std::max(next.bound, std::max(0.0, d2 - in.radius_right));
        if (!opts.prune || !counters.less(query_radius(), b1)) frontier.push({b1, in.left});
        if (!opts.prune || !counters.less(query_radius(), b2)) frontier.push({b2, in.right});
    }

    std::vector<Hit> out;
    out.reserve(best.size());
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

TreeStats GhTree::stats() const {
    TreeStats s;
    s.oversized_leaves = oversized_leaves_;
    if (nodes_.empty()) return s;
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [at, level] = stack.back();
        stack.pop_back();
        if (s.nodes_per_level.size() <= level) s.nodes_per_level.resize(level + 1, 0);
        ++s.nodes_per_level[level];
        s.height = std::max(s.height, level);
        if (const auto* in = std::get_if<InternalNode>(&nodes_[at])) {
            ++s.internal_nodes;
            stack.push_back({in->right, level + 1});
            stack.push_back({in->left, level + 1});
        } else {
            ++s.leaves;
            ++s.bucket_histogram[std::get<LeafNode>(nodes_[at]).bucket.size()];
        }
    }
    return s;
}

std::vector<ObjectId> GhTree::members() const {
    std::vector<ObjectId> out;
    if (nodes_.empty()) return out;
    std::vector<NodeIndex> stack{0};
    while (!stack.empty()) {
        const NodeIndex at = stack.back();
        stack.pop_back();
        if (const auto* in = std::get_if<InternalNode>(&nodes_[at])) {
            stack.push_back(in->right);
            stack.push_back(in->left);
        } else {
            const auto& b = std::get<LeafNode>(nodes_[at]).bucket;
            out.insert(out.end(), b.begin(), b.end());
        }
    }
    return out;
}

TreeAudit GhTree::audit(const Dataset& ds, const DistanceFn& fn) const {
    TreeAudit a;
    CostCounters scratch;
    constexpr double kSlack = 1e-9;

    // Returns the subtree's objects so each ancestor can check its radius.
    auto walk = [&](auto&& self, NodeIndex at) -> std::vector<ObjectId> {
        if (const auto* leaf = std::get_if<LeafNode>(&nodes_[at])) {
            a.objects_seen += leaf->bucket.size();
            if (leaf->bucket.size() > capacity_ && select_pivots(leaf->bucket, ds, fn, scratch))
                ++a.capacity_violations;
            return leaf->bucket;
        }
        const auto& in = std::get<InternalNode>(nodes_[at]);
        if (!(fn(in.pivot_left, in.pivot_right, scratch) > 0.0)) ++a.pivot_violations;
        auto left = self(self, in.left);
        auto right = self(self, in.right);
        for (ObjectId id : left)
            if (fn(in.pivot_left, ds.coords(id), scratch) > in.radius_left + kSlack) ++a.radius_violations;
        for (ObjectId id : right)
            if (fn(in.pivot_right, ds.coords(id), scratch) > in.radius_right + kSlack) ++a.radius_violations;
        left.insert(left.end(), right.begin(), right.end());
        return left;
    };
    if (!nodes_.empty()) walk(walk, 0);
    a.ok = a.capacity_violations == 0 && a.radius_violations == 0 && a.pivot_violations == 0 &&
           a.objects_seen == size_;
    return a;
}

} // namespace ballidx
