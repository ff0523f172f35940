#include "ballidx/planner.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace ballidx {

void Thresholds::validate() const {
    if (!(xi_min >= 0.0 && xi_max <= 1.0))
        throw config_error("thresholds must lie in [0, 1]");
    if (!(xi_min <= xi_max))
        throw config_error("xi_min (" + std::to_string(xi_min) + ") exceeds xi_max (" + std::to_string(xi_max) + ")");
}

std::string_view to_string(OverlapLevel level) noexcept {
    switch (level) {
    case OverlapLevel::Low: return "low";
    case OverlapLevel::Medium: return "medium";
    case OverlapLevel::High: return "high";
    }
    return "?";
}

std::string_view to_string(GroupKind kind) noexcept {
    return kind == GroupKind::Cluster ? "cluster" : "bridge";
}

const std::vector<std::pair<std::string_view, std::size_t PlanSummary::*>>& plan_summary_fields() {
    static const std::vector<std::pair<std::string_view, std::size_t PlanSummary::*>> fields{
        {"input_partitions", &PlanSummary::input_partitions},
        {"pairs_scored", &PlanSummary::pairs_scored},
        {"low_pairs", &PlanSummary::low_pairs},
        {"medium_pairs", &PlanSummary::medium_pairs},
        {"high_pairs", &PlanSummary::high_pairs},
        {"disjoint_pairs", &PlanSummary::disjoint_pairs},
        {"partial_pairs", &PlanSummary::partial_pairs},
        {"containment_pairs", &PlanSummary::containment_pairs},
        {"merges", &PlanSummary::merges},
        {"transfers", &PlanSummary::transfers},
        {"objects_transferred", &PlanSummary::objects_transferred},
        {"bridges", &PlanSummary::bridges},
        {"objects_bridged", &PlanSummary::objects_bridged},
        {"folded_bridges", &PlanSummary::folded_bridges},
        {"dropped_groups", &PlanSummary::dropped_groups},
        {"rounds", &PlanSummary::rounds},
        {"neighbor_edges", &PlanSummary::neighbor_edges},
    };
    return fields;
}

OverlapLevel classify(double rate, const Thresholds& th) noexcept {
    if (rate < th.xi_min) return OverlapLevel::Low;
    if (rate < th.xi_max) return OverlapLevel::Medium;
    return OverlapLevel::High;
}

OverlapReport score_pair(OverlapMethod method, const Dataset& ds, const Partition& a, const Partition& b,
                         const DistanceFn& fn, CostCounters& counters) {
    const double dist = fn(a.pivot, b.pivot, counters);
    switch (method) {
    case OverlapMethod::Vbm: return vbm_rate(Ball{a.pivot, a.radius}, Ball{b.pivot, b.radius}, dist);
    case OverlapMethod::Dbm: return dbm_rate(Ball{a.pivot, a.radius}, Ball{b.pivot, b.radius}, dist);
    case OverlapMethod::Obm: return obm_rate(ds, a, b, dist, fn, counters);
    }
    throw internal_error("unhandled overlap method");
}

namespace {

// Mutable planning state. Groups are addressed by a uid equal to their slot
// in `groups`; slots are never reused, merged or emptied groups go dead.
struct WorkGroup {
    Partition part;  // part.id == uid
    GroupKind kind = GroupKind::Cluster;
    bool alive = true;
    std::set<int> neighbors;
};

struct ScoredPair {
    int a;
    int b;
    OverlapReport report;
};

class Planner {
public:
    Planner(OverlapMethod method, const Thresholds& th, const Dataset& ds, const DistanceFn& fn,
            CostCounters& counters)
        : method_(method), th_(th), ds_(ds), fn_(fn), counters_(counters) {}

    IndexPlan run(const std::vector<Partition>& partitions) {
        for (const auto& p : partitions) {
            if (p.members.empty()) continue;
            add_group(p.members, GroupKind::Cluster);
        }
        summary_.input_partitions = partitions.size();
        tally_initial(score_clusters());

        constexpr std::size_t kMaxRounds = 10;
        bool changed = true;
        while (changed && summary_.rounds < kMaxRounds) {
            ++summary_.rounds;
            changed = merge_to_fixpoint();
            changed = process_medium_and_low() || changed;
        }
        summary_.round_cap_hit = changed;

        // Folding a bridge grows its parent, and a later merge can orphan
        // another bridge, so alternate until both are stable.
        while (fold_orphan_bridges() | merge_to_fixpoint()) {
        }
        return emit();
    }

private:
    int add_group(std::vector<ObjectId> members, GroupKind kind) {
        const int uid = static_cast<int>(groups_.size());
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        WorkGroup g;
        g.part = make_partition(uid, std::move(members), ds_, fn_, counters_);
        g.kind = kind;
        groups_.push_back(std::move(g));
        return uid;
    }

    void kill(int uid) {
        auto& g = groups_[static_cast<std::size_t>(uid)];
        g.alive = false;
        for (int nb : g.neighbors) groups_[static_cast<std::size_t>(nb)].neighbors.erase(uid);
        g.neighbors.clear();
    }

    void link(int a, int b) {
        groups_[static_cast<std::size_t>(a)].neighbors.insert(b);
        groups_[static_cast<std::size_t>(b)].neighbors.insert(a);
    }

    std::vector<int> alive_clusters() const {
        std::vector<int> out;
        for (const auto& g : groups_)
            if (g.alive && g.kind == GroupKind::Cluster) out.push_back(g.part.id);
        return out;
    }

    OverlapReport score(int a, int b) {
        return score_pair(method_, ds_, groups_[static_cast<std::size_t>(a)].part,
                          groups_[static_cast<std::size_t>(b)].part, fn_, counters_);
    }

    std::vector<ScoredPair> score_clusters() {
        const auto ids = alive_clusters();
        std::vector<ScoredPair> out;
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j) out.push_back({ids[i], ids[j], score(ids[i], ids[j])});
        // Descending rate, ties by (smaller uid, larger uid).
        std::stable_sort(out.begin(), out.end(), [](const ScoredPair& x, const ScoredPair& y) {
            if (x.report.rate != y.report.rate) return x.report.rate > y.report.rate;
            return std::pair(x.a, x.b) < std::pair(y.a, y.b);
        });
        return out;
    }

    void tally_initial(const std::vector<ScoredPair>& pairs) {
        summary_.pairs_scored = pairs.size();
        for (const auto& p : pairs) {
            switch (classify(p.report.rate, th_)) {
            case OverlapLevel::Low: ++summary_.low_pairs; break;
            case OverlapLevel::Medium: ++summary_.medium_pairs; break;
            case OverlapLevel::High: ++summary_.high_pairs; break;
            }
            switch (p.report.regime) {
            case Regime::Disjoint: ++summary_.disjoint_pairs; break;
            case Regime::PartialOverlap: ++summary_.partial_pairs; break;
            case Regime::Containment: ++summary_.containment_pairs; break;
            }
        }
    }

    // Merges connected components of High pairs until none remain.
    bool merge_to_fixpoint() {
        bool any = false;
        for (;;) {
            const auto pairs = score_clusters();
            std::map<int, int> parent;
            auto find = [&](int x) {
                while (parent.at(x) != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            for (int id : alive_clusters()) parent[id] = id;
            bool found = false;
            for (const auto& p : pairs) {
                if (classify(p.report.rate, th_) != OverlapLevel::High) continue;
                found = true;
                const int ra = find(p.a), rb = find(p.b);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
            if (!found) return any;
            any = true;

            std::map<int, std::vector<int>> components;
            for (const auto& [id, _] : parent) components[find(id)].push_back(id);
            for (const auto& [root, comp] : components) {
                if (comp.size() < 2) continue;
                std::vector<ObjectId> members;
                std::set<int> neighbors;
                for (int id : comp) {
                    const auto& g = groups_[static_cast<std::size_t>(id)];
                    members.insert(members.end(), g.part.members.begin(), g.part.members.end());
                    neighbors.insert(g.neighbors.begin(), g.neighbors.end());
                }
                for (int id : comp) kill(id);
                const int merged = add_group(std::move(members), GroupKind::Cluster);
                for (int nb : neighbors)
                    if (groups_[static_cast<std::size_t>(nb)].alive) link(merged, nb);
                summary_.merges += comp.size() - 1;
            }
        }
    }

    bool process_medium_and_low() {
        bool changed = false;
        for (const auto& candidate : score_clusters()) {
            const int a = candidate.a, b = candidate.b;
            if (!groups_[static_cast<std::size_t>(a)].alive || !groups_[static_cast<std::size_t>(b)].alive) continue;
            if (handled_.contains({a, b})) continue;

            const OverlapReport rep = score(a, b);
            const OverlapLevel level = classify(rep.rate, th_);
            if (level == OverlapLevel::High) {
                // Earlier extractions in this pass produced a new High pair; the next round merges it.
                changed = true;
                continue;
            }
            handled_.insert({a, b});
            if (level == OverlapLevel::Medium)
                changed = extract_bridge(a, b) || changed;
            else if (rep.regime == Regime::PartialOverlap)
                changed = transfer_overlap(a, b) || changed;
        }
        return changed;
    }

    bool in_both(ObjectId id, const Partition& a, const Partition& b) {
        auto o = ds_.coords(id);
        const double da = fn_(o, a.pivot, counters_);
        const double db = fn_(o, b.pivot, counters_);
        return counters_.less_equal(da, a.radius) && counters_.less_equal(db, b.radius);
    }

    // Splits members of `from` into (kept, lying in both balls).
    std::pair<std::vector<ObjectId>, std::vector<ObjectId>> split_shared(int from, const Partition& a,
                                                                         const Partition& b) {
        std::vector<ObjectId> kept, shared;
        for (ObjectId id : groups_[static_cast<std::size_t>(from)].part.members)
            (in_both(id, a, b) ? shared : kept).push_back(id);
        return {std::move(kept), std::move(shared)};
    }

    void replace_members(int uid, std::vector<ObjectId> members) {
        auto& g = groups_[static_cast<std::size_t>(uid)];
        if (members.empty()) {
            kill(uid);
            ++summary_.dropped_groups;
            return;
        }
        std::sort(members.begin(), members.end());
        g.part.members = std::move(members);
        refit(g.part, ds_, fn_, counters_);
    }

    bool extract_bridge(int a, int b) {
        const Partition pa = groups_[static_cast<std::size_t>(a)].part;
        const Partition pb = groups_[static_cast<std::size_t>(b)].part;
        auto [kept_a, shared_a] = split_shared(a, pa, pb);
        auto [kept_b, shared_b] = split_shared(b, pa, pb);
        if (shared_a.empty() && shared_b.empty()) return false;

        std::vector<ObjectId> shared = std::move(shared_a);
        shared.insert(shared.end(), shared_b.begin(), shared_b.end());
        summary_.objects_bridged += shared.size();
        ++summary_.bridges;

        const int bridge = add_group(std::move(shared), GroupKind::OverlapBridge);
        link(a, bridge);
        link(b, bridge);
        replace_members(a, std::move(kept_a));
        replace_members(b, std::move(kept_b));
        return true;
    }

    bool transfer_overlap(int a, int b) {
        const Partition pa = groups_[static_cast<std::size_t>(a)].part;
        const Partition pb = groups_[static_cast<std::size_t>(b)].part;
        const double dist = fn_(pa.pivot, pb.pivot, counters_);
        const double ha = cap_geometry(pa.radius, pb.radius, dist).height;
        const double hb = cap_geometry(pb.radius, pa.radius, dist).height;
        // The smaller cap donates; on a tie the later group donates.
        const bool a_donates = counters_.less(ha, hb);
        const int donor = a_donates ? a : b;
        const int receiver = a_donates ? b : a;

        auto [kept, moved] = split_shared(donor, pa, pb);
        if (moved.empty()) return false;
        ++summary_.transfers;
        summary_.objects_transferred += moved.size();

        std::vector<ObjectId> grown = groups_[static_cast<std::size_t>(receiver)].part.members;
        grown.insert(grown.end(), moved.begin(), moved.end());
        replace_members(receiver, std::move(grown));
        replace_members(donor, std::move(kept));
        return true;
    }

    // A bridge needs two distinct live parents; otherwise its objects return
    // to the remaining parent (or it becomes a plain cluster if none is left).
    bool fold_orphan_bridges() {
        bool any = false;
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            auto& g = groups_[i];
            if (!g.alive || g.kind != GroupKind::OverlapBridge || g.neighbors.size() >= 2) continue;
            any = true;
            ++summary_.folded_bridges;
            if (g.neighbors.empty()) {
                g.kind = GroupKind::Cluster;
                continue;
            }
            const int parent = *g.neighbors.begin();
            std::vector<ObjectId> grown = groups_[static_cast<std::size_t>(parent)].part.members;
            grown.insert(grown.end(), g.part.members.begin(), g.part.members.end());
            kill(static_cast<int>(i));
            replace_members(parent, std::move(grown));
        }
        return any;
    }

    IndexPlan emit() {
        IndexPlan plan;
        std::map<int, std::size_t> index_of;
        for (const auto& g : groups_) {
            if (!g.alive) continue;
            index_of[g.part.id] = plan.groups.size();
            plan.groups.push_back(IndexGroup{g.part.members, g.part.pivot, g.part.radius, g.kind});
        }
        plan.neighbors.resize(plan.groups.size());
        std::size_t directed = 0;
        for (const auto& g : groups_) {
            if (!g.alive) continue;
            auto& out = plan.neighbors[index_of.at(g.part.id)];
            for (int nb : g.neighbors) out.push_back(index_of.at(nb));
            std::sort(out.begin(), out.end());
            directed += out.size();
        }
        summary_.neighbor_edges = directed / 2;
        plan.summary = summary_;
        return plan;
    }

    OverlapMethod method_;
    Thresholds th_;
    const Dataset& ds_;
    const DistanceFn& fn_;
    CostCounters& counters_;

    std::vector<WorkGroup> groups_;
    std::set<std::pair<int, int>> handled_;
    PlanSummary summary_;
};

} // namespace

IndexPlan plan_indexes(const std::vector<Partition>& partitions, OverlapMethod method, const Thresholds& th,
                       const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    th.validate();
    const bool any_members =
        std::any_of(partitions.begin(), partitions.end(), [](const Partition& p) { return !p.members.empty(); });
    if (!any_members) throw config_error("plan_indexes: no non-empty partitions to plan");
    return Planner(method, th, ds, fn, counters).run(partitions);
}

IndexPlan single_group_plan(const Dataset& ds, const DistanceFn& fn, CostCounters& counters) {
    if (ds.empty()) throw data_error("cannot plan an empty dataset");
    const Partition all = make_partition(1, ds.all_ids(), ds, fn, counters);
    IndexPlan plan;
    plan.groups.push_back(IndexGroup{all.members, all.pivot, all.radius, GroupKind::Cluster});
    plan.neighbors.resize(1);
    plan.summary.input_partitions = 1;
    return plan;
}

} // namespace ballidx
