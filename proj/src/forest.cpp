#include "ballidx/forest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <unordered_set>

namespace ballidx {

std::string_view to_string(BuildMethod m) noexcept {
    switch (m) {
    case BuildMethod::Vbm: return "vbm";
    case BuildMethod::Dbm: return "dbm";
    case BuildMethod::Obm: return "obm";
    case BuildMethod::Baseline: return "baseline";
    }
    return "?";
}

BuildMethod parse_build_method(std::string_view name) {
    if (name == "vbm") return BuildMethod::Vbm;
    if (name == "dbm") return BuildMethod::Dbm;
    if (name == "obm") return BuildMethod::Obm;
    if (name == "baseline") return BuildMethod::Baseline;
    throw config_error("unknown method '" + std::string(name) + "' (expected vbm, dbm, obm or baseline)");
}

Forest::Forest(std::shared_ptr<const Dataset> ds, DistanceFn fn, BuildMethod method, std::vector<GhTree> trees,
               std::vector<std::vector<std::size_t>> neighbors, PlanSummary summary)
    : ds_(std::move(ds)), fn_(std::move(fn)), method_(method), trees_(std::move(trees)),
      neighbors_(std::move(neighbors)), summary_(summary) {
    if (!ds_) throw internal_error("forest without a dataset");
    if (neighbors_.size() != trees_.size()) throw data_error("neighbor table does not match tree count");
    for (std::size_t t = 0; t < neighbors_.size(); ++t) {
        for (std::size_t nb : neighbors_[t]) {
            if (nb >= trees_.size() || nb == t) throw data_error("tree neighbor reference out of range");
            const auto& back = neighbors_[nb];
            if (std::find(back.begin(), back.end(), t) == back.end())
                throw data_error("tree neighbor relation is not symmetric");
        }
    }
    if (method_ == BuildMethod::Baseline && trees_.size() != 1)
        throw data_error("a baseline forest holds exactly one tree");
}

Forest Forest::from_plan(std::shared_ptr<const Dataset> ds, DistanceFn fn, BuildMethod method,
                         const IndexPlan& plan, CostCounters& counters) {
    std::vector<GhTree> trees;
    trees.reserve(plan.groups.size());
    for (const auto& group : plan.groups) trees.push_back(GhTree::build(group, *ds, fn, counters));
    return Forest(std::move(ds), std::move(fn), method, std::move(trees), plan.neighbors, plan.summary);
}

namespace {

std::vector<double> center_distances(const Forest& forest, std::span<const double> q, CostCounters& counters) {
    std::vector<double> out;
    out.reserve(forest.trees().size());
    for (const auto& tree : forest.trees()) out.push_back(forest.metric()(tree.center(), q, counters));
    return out;
}

std::vector<std::size_t> closest_with_neighbors(const Forest& forest, const std::vector<double>& dists,
                                                CostCounters& counters) {
    if (dists.empty()) throw domain_error("query on an empty forest");
    std::size_t closest = 0;
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < dists.size(); ++t) {
        if (counters.less(dists[t], min_dist)) {
            min_dist = dists[t];
            closest = t;
        }
    }
    std::vector<std::size_t> out{closest};
    const auto& nbs = forest.neighbors(closest);
    out.insert(out.end(), nbs.begin(), nbs.end());
    return out;
}

struct TreeAnswer {
    std::vector<Hit> hits;
    CostCounters counters;
};

TreeAnswer search_tree(const Forest& forest, std::size_t tree, std::span<const double> q, std::size_t k,
                       const SearchOptions& opts) {
    TreeAnswer ans;
    const auto& t = forest.trees()[tree];
    const double r_q = t.estimate_query_radius(forest.dataset(), q, k, forest.metric(), ans.counters);
    ans.hits = t.knn_search(forest.dataset(), q, k, forest.metric(), ans.counters, r_q, opts);
    return ans;
}

} // namespace

std::vector<std::size_t> select_indexes(const Forest& forest, std::span<const double> q, CostCounters& counters) {
    return closest_with_neighbors(forest, center_distances(forest, q, counters), counters);
}

QueryResult forest_knn(const Forest& forest, std::span<const double> q, std::size_t k, QueryOptions opts) {
    const auto start = std::chrono::steady_clock::now();
    if (k == 0) throw domain_error("k must be at least 1");
    if (q.size() != forest.dataset().dimension())
        throw data_error("query has dimension " + std::to_string(q.size()) + ", expected " +
                         std::to_string(forest.dataset().dimension()));

    QueryResult res;
    const auto dists = center_distances(forest, q, res.counters);
    res.searched_tree_ids = closest_with_neighbors(forest, dists, res.counters);

    std::vector<TreeAnswer> answers(res.searched_tree_ids.size());
    if (opts.parallel && answers.size() > 1) {
        std::vector<std::future<TreeAnswer>> pending;
        pending.reserve(answers.size());
        for (std::size_t tree : res.searched_tree_ids)
            pending.push_back(std::async(std::launch::async, search_tree, std::cref(forest), tree, q, k,
                                         std::cref(opts.search)));
        for (std::size_t i = 0; i < pending.size(); ++i) answers[i] = pending[i].get();
    } else {
        for (std::size_t i = 0; i < answers.size(); ++i)
            answers[i] = search_tree(forest, res.searched_tree_ids[i], q, k, opts.search);
    }

    std::vector<Hit> gathered;
    auto gather = [&](TreeAnswer& ans) {
        res.counters += ans.counters;
        gathered.insert(gathered.end(), ans.hits.begin(), ans.hits.end());
    };
    for (auto& ans : answers) gather(ans);

    if (gathered.size() < k && res.searched_tree_ids.size() < forest.trees().size()) {
        std::vector<std::size_t> rest;
        for (std::size_t t = 0; t < forest.trees().size(); ++t)
            if (std::find(res.searched_tree_ids.begin(), res.searched_tree_ids.end(), t) ==
                res.searched_tree_ids.end())
                rest.push_back(t);
        std::stable_sort(rest.begin(), rest.end(),
                         [&](std::size_t a, std::size_t b) { return res.counters.less(dists[a], dists[b]); });
        for (std::size_t t : rest) {
            if (gathered.size() >= k) break;
            TreeAnswer ans = search_tree(forest, t, q, k, opts.search);
            gather(ans);
            res.searched_tree_ids.push_back(t);
        }
    }

    std::unordered_set<ObjectId> seen;
    for (const Hit& h : gathered)
        if (!seen.insert(h.id).second)
            throw internal_error("object " + std::to_string(h.id) + " returned by two trees");

    std::sort(gathered.begin(), gathered.end(), [&](const Hit& a, const Hit& b) {
        ++res.counters.comparison_count;
        return a < b;
    });
    if (gathered.size() > k) gathered.resize(k);
    res.hits = std::move(gathered);
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

double recall_at_k(const std::vector<Hit>& result, const std::vector<Hit>& oracle) {
    if (result.size() != oracle.size())
        throw domain_error("recall_at_k: result has " + std::to_string(result.size()) + " hits, oracle has " +
                           std::to_string(oracle.size()));
    if (oracle.empty()) return 1.0;

    std::vector<double> got, want;
    for (const Hit& h : result) got.push_back(h.distance);
    for (const Hit& h : oracle) want.push_back(h.distance);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());

    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    std::size_t matched = 0, i = 0, j = 0;
    while (i < got.size() && j < want.size()) {
        if (same(got[i], want[j])) {
            ++matched;
            ++i;
            ++j;
        } else if (got[i] < want[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(oracle.size());
}

} // namespace ballidx
