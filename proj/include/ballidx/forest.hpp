#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "ballidx/ghtree.hpp"
#include "ballidx/metric.hpp"
#include "ballidx/planner.hpp"

namespace ballidx {

enum class BuildMethod { Vbm, Dbm, Obm, Baseline };

std::string_view to_string(BuildMethod m) noexcept;
BuildMethod parse_build_method(std::string_view name);

/// A set of trees over one dataset. Each tree keeps its group's centroid and
/// radius; neighbours are symmetric indices into trees().
class Forest {
public:
    Forest() = default;
    Forest(std::shared_ptr<const Dataset> ds, DistanceFn fn, BuildMethod method, std::vector<GhTree> trees,
           std::vector<std::vector<std::size_t>> neighbors, PlanSummary summary);

    /// Builds one tree per plan group.
    static Forest from_plan(std::shared_ptr<const Dataset> ds, DistanceFn fn, BuildMethod method,
                            const IndexPlan& plan, CostCounters& counters);

    const Dataset& dataset() const noexcept { return *ds_; }
    const std::shared_ptr<const Dataset>& dataset_ptr() const noexcept { return ds_; }
    const DistanceFn& metric() const noexcept { return fn_; }
    BuildMethod method() const noexcept { return method_; }
    const std::vector<GhTree>& trees() const noexcept { return trees_; }
    const std::vector<std::size_t>& neighbors(std::size_t tree) const { return neighbors_.at(tree); }
    const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return neighbors_; }
    const PlanSummary& plan_summary() const noexcept { return summary_; }

private:
    std::shared_ptr<const Dataset> ds_;
    DistanceFn fn_;
    BuildMethod method_ = BuildMethod::Baseline;
    std::vector<GhTree> trees_;
    std::vector<std::vector<std::size_t>> neighbors_;
    PlanSummary summary_;
};

struct QueryResult {
    std::vector<Hit> hits;  ///< ascending (distance, id), at most k
    std::vector<std::size_t> searched_tree_ids;
    CostCounters counters;  ///< selection plus every per-tree search
    double elapsed_seconds = 0.0;
};

struct QueryOptions {
    bool parallel = true;  ///< run the selected per-tree searches on separate threads
    SearchOptions search;
};

/// Tree whose center is nearest to q (ties keep the lower id) followed by its
/// neighbours. One distance and one comparison per tree.
std::vector<std::size_t> select_indexes(const Forest& forest, std::span<const double> q, CostCounters& counters);

/// Routed kNN: each selected tree estimates its own query radius and runs an
/// exact search with private counters; results are gathered, sorted and cut
/// to k. If fewer than k hits come back, the remaining trees are searched in
/// ascending center distance until k hits exist or the forest is exhausted.
QueryResult forest_knn(const Forest& forest, std::span<const double> q, std::size_t k, QueryOptions opts = {});

/// Fraction of the oracle's k answers matched by distance (ties count), over k.
double recall_at_k(const std::vector<Hit>& result, const std::vector<Hit>& oracle);

} // namespace ballidx
