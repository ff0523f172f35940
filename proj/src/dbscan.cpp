#include "ballidx/dbscan.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

namespace ballidx {

Partition make_partition(int id, std::vector<ObjectId> members, const Dataset& ds, const DistanceFn& fn,
                         CostCounters& counters) {
    Partition part;
    part.id = id;
    part.members = std::move(members);
    refit(part, ds, fn, counters);
    return part;
}

void refit(Partition& part, const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    part.pivot = centroid(ds, part.members);
    part.radius = 0.0;
    for (ObjectId id : part.members) {
        const double d = fn(part.pivot, ds.coords(id), counters);
        if (counters.less(part.radius, d)) part.radius = d;
    }
}

void DbscanParams::validate() const {
    if (!(epsilon > 0.0)) throw config_error("epsilon must be positive");
    if (min_pts < 1) throw config_error("min_pts must be at least 1");
}

std::vector<ObjectId> epsilon_neighborhood(const ObjectView& o, const Dataset& ds, double eps, const DistanceFn& fn,
                                           CostCounters& counters) {
    std::vector<ObjectId> out;
    const auto n = static_cast<ObjectId>(ds.size());
    for (ObjectId q = 0; q < n; ++q) {
        if (counters.less_equal(fn(o.coords, ds.coords(q), counters), eps)) out.push_back(q);
    }
    return out;
}

namespace {

constexpr int kUnclassified = -1;

// Classic ExpandCluster: a non-core start point is provisionally noise; a core
// point seeds a FIFO frontier whose core members keep growing the cluster.
bool expand_cluster(const Dataset& ds, ObjectId start, int cluster_id, const DbscanParams& params,
                    const DistanceFn& fn, CostCounters& counters, std::vector<int>& labels) {
    auto seeds = epsilon_neighborhood(ds.object(start), ds, params.epsilon, fn, counters);
    if (seeds.size() < params.min_pts) {
        labels[start] = kNoise;
        return false;
    }
    std::deque<ObjectId> frontier;
    for (ObjectId s : seeds) {
        labels[s] = cluster_id;
        if (s != start) frontier.push_back(s);
    }
    while (!frontier.empty()) {
        const ObjectId current = frontier.front();
        frontier.pop_front();
        auto result = epsilon_neighborhood(ds.object(current), ds, params.epsilon, fn, counters);
        if (result.size() < params.min_pts) continue;
        for (ObjectId r : result) {
            if (labels[r] == kUnclassified || labels[r] == kNoise) {
                if (labels[r] == kUnclassified) frontier.push_back(r);
                labels[r] = cluster_id;
            }
        }
    }
    return true;
}

} // namespace

DbscanResult run_dbscan(const Dataset& ds, const DbscanParams& params, const DistanceFn& fn, CostCounters& counters) {
    params.validate();
    const auto n = static_cast<ObjectId>(ds.size());
    DbscanResult out;
    out.labels.assign(n, kUnclassified);

    int cluster_id = kNoise + 1;
    for (ObjectId o = 0; o < n; ++o) {
        if (out.labels[o] != kUnclassified) continue;
        if (expand_cluster(ds, o, cluster_id, params, fn, counters, out.labels)) ++cluster_id;
    }

    std::vector<std::vector<ObjectId>> members(static_cast<std::size_t>(cluster_id));
    for (ObjectId o = 0; o < n; ++o) {
        if (out.labels[o] == kNoise)
            out.noise_ids.push_back(o);
        else
            members[static_cast<std::size_t>(out.labels[o])].push_back(o);
    }
    for (int c = kNoise + 1; c < cluster_id; ++c)
        out.partitions.push_back(make_partition(c, std::move(members[static_cast<std::size_t>(c)]), ds, fn, counters));
    return out;
}

std::vector<Partition> absorb_noise(std::vector<Partition> partitions, const std::vector<ObjectId>& noise_ids,
                                    const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    if (noise_ids.empty()) return partitions;
    if (partitions.empty()) {
        partitions.push_back(make_partition(kNoise + 1, noise_ids, ds, fn, counters));
        return partitions;
    }

    std::vector<bool> touched(partitions.size(), false);
    for (ObjectId id : noise_ids) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < partitions.size(); ++p) {
            const double d = fn(partitions[p].pivot, ds.coords(id), counters);
            if (counters.less(d, best_d)) {
                best_d = d;
                best = p;
            }
        }
        partitions[best].members.push_back(id);
        touched[best] = true;
    }
    for (std::size_t p = 0; p < partitions.size(); ++p) {
        if (!touched[p]) continue;
        std::sort(partitions[p].members.begin(), partitions[p].members.end());
        refit(partitions[p], ds, fn, counters);
    }
    return partitions;
}

} // namespace ballidx
