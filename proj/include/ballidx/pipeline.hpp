#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ballidx/dbscan.hpp"
#include "ballidx/forest.hpp"
#include "ballidx/planner.hpp"

namespace ballidx {

struct BuildConfig {
    std::string input_path;
    BuildMethod method = BuildMethod::Vbm;
    DbscanParams dbscan;
    Thresholds thresholds;  // 0.4 / 0.8 by default
    std::string metric = "euclidean";
    std::uint64_t seed = 42;

    /// Throws a config error for bad thresholds, an unknown metric, or missing
    /// clustering parameters on an overlap-managed method.
    void validate() const;
};

/// Build cost split by stage. `indexing` covers tree construction only and is
/// the figure compared across methods; the other two are preprocessing.
struct PhaseCosts {
    CostCounters clustering;  ///< DBSCAN and noise absorption
    CostCounters planning;    ///< overlap scoring and plan restructuring
    CostCounters indexing;    ///< GH-tree construction

    CostCounters total() const { return clustering + planning + indexing; }
};

struct BuildReport {
    BuildMethod method = BuildMethod::Baseline;
    std::size_t objects = 0;
    std::size_t dimension = 0;
    std::size_t clusters = 0;  ///< DBSCAN clusters before noise absorption
    std::size_t noise = 0;
    PhaseCosts costs;
    double elapsed_seconds = 0.0;
};

struct BuildOutput {
    Forest forest;
    BuildReport report;
};

/// dbscan -> absorb_noise -> plan_indexes -> one tree per group. The baseline
/// method skips the first three stages and indexes the whole dataset in one tree.
BuildOutput build_forest(std::shared_ptr<const Dataset> ds, const BuildConfig& cfg);

/// Same pipeline with an explicit metric, which may be custom.
BuildOutput build_forest(std::shared_ptr<const Dataset> ds, const BuildConfig& cfg, const DistanceFn& fn);

} // namespace ballidx
