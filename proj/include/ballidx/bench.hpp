#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ballidx/forest.hpp"
#include "ballidx/ghtree.hpp"
#include "ballidx/pipeline.hpp"

namespace ballidx {

/// Cost of one query at one k.
struct QueryRow {
    std::size_t query = 0;
    std::size_t k = 0;
    std::uint64_t distances = 0;
    std::uint64_t comparisons = 0;
    double elapsed_seconds = 0.0;
    std::vector<std::size_t> trees;
    std::optional<double> recall;
};

/// Means over all queries at one k (recall only when the oracle ran).
struct QueryAggregate {
    std::size_t k = 0;
    std::size_t queries = 0;
    double mean_distances = 0.0;
    double mean_comparisons = 0.0;
    double mean_elapsed_seconds = 0.0;
    double median_elapsed_seconds = 0.0;
    double mean_trees_searched = 0.0;
    std::optional<double> mean_recall;
    std::optional<double> min_recall;
};

struct QueryWorkload {
    std::vector<QueryRow> rows;  ///< grouped by k, then query order
    std::vector<QueryAggregate> aggregates;
};

/// Runs every query at every k sequentially. With `oracle`, each answer is
/// compared against a brute-force scan of the whole dataset.
QueryWorkload run_queries(const Forest& forest, const Dataset& queries, std::span<const std::size_t> ks, bool oracle,
                          QueryOptions opts = {});

/// Default k values of the comparative benchmark.
inline const std::vector<std::size_t> kDefaultBenchKs{5, 10, 15, 20, 50, 100};

struct BenchConfig {
    BuildConfig build;  ///< method is ignored; all four are built
    std::vector<std::size_t> ks = kDefaultBenchKs;
    std::size_t num_queries = 100;
    bool oracle = false;

    void validate() const;
};

struct MethodBench {
    BuildReport build;
    PlanSummary plan;
    std::vector<TreeStats> trees;
    std::vector<std::size_t> tree_sizes;
    QueryWorkload workload;
};

struct BenchResult {
    std::size_t query_count = 0;
    std::vector<MethodBench> methods;  ///< vbm, dbm, obm, baseline
};

/// Builds every method on the same dataset and runs the identical query set against each.
BenchResult run_bench(const std::shared_ptr<const Dataset>& ds, const Dataset& queries, const BenchConfig& cfg);

/// n dataset members drawn without replacement (all of them if n >= size).
Dataset sample_queries(const Dataset& ds, std::size_t n, std::uint64_t seed);

/// Seeded isotropic Gaussian clusters. Cluster c is centred at
/// separation * (c / dimension + 1) along axis c % dimension; point i belongs
/// to cluster i % clusters.
struct GenConfig {
    std::size_t clusters = 3;
    std::size_t points = 10'000;
    std::size_t dimension = 5;
    double spread = 1.0;
    double separation = 20.0;
    std::uint64_t seed = 42;

    void validate() const;
};

Dataset generate_clusters(const GenConfig& cfg);

/// n fresh draws from the same clusters, under a separate seed.
Dataset generate_cluster_queries(const GenConfig& cfg, std::size_t n, std::uint64_t seed);

} // namespace ballidx
