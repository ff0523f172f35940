#include "ballidx/bench.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ballidx/oracles.hpp"

namespace ballidx {

QueryWorkload run_queries(const Forest& forest, const Dataset& queries, std::span<const std::size_t> ks, bool oracle,
                          QueryOptions opts) {
    if (ks.empty()) throw config_error("no k values given");
    if (queries.empty()) throw data_error("no queries given");
    if (queries.dimension() != forest.dataset().dimension())
        throw data_error("queries have dimension " + std::to_string(queries.dimension()) + ", forest expects " +
                         std::to_string(forest.dataset().dimension()));

    QueryWorkload out;
    for (std::size_t k : ks) {
        if (k == 0) throw config_error("k must be at least 1");
        QueryAggregate agg;
        agg.k = k;
        agg.queries = queries.size();
        std::vector<double> elapsed;
        std::vector<double> recalls;
        for (ObjectId qi = 0; qi < queries.size(); ++qi) {
            const auto q = queries.coords(qi);
            const QueryResult res = forest_knn(forest, q, k, opts);
            QueryRow row;
            row.query = qi;
            row.k = k;
            row.distances = res.counters.distance_count;
            row.comparisons = res.counters.comparison_count;
            row.elapsed_seconds = res.elapsed_seconds;
            row.trees = res.searched_tree_ids;
            if (oracle) {
                row.recall = recall_at_k(res.hits, oracle::brute_knn(forest.dataset(), q, k));
                recalls.push_back(*row.recall);
            }
            agg.mean_distances += static_cast<double>(row.distances);
            agg.mean_comparisons += static_cast<double>(row.comparisons);
            agg.mean_elapsed_seconds += row.elapsed_seconds;
            agg.mean_trees_searched += static_cast<double>(row.trees.size());
            elapsed.push_back(row.elapsed_seconds);
            out.rows.push_back(std::move(row));
        }
        const auto n = static_cast<double>(queries.size());
        agg.mean_distances /= n;
        agg.mean_comparisons /= n;
        agg.mean_elapsed_seconds /= n;
        agg.mean_trees_searched /= n;
        std::sort(elapsed.begin(), elapsed.end());
        const std::size_t mid = elapsed.size() / 2;
        agg.median_elapsed_seconds =
            elapsed.size() % 2 ? elapsed[mid] : 0.5 * (elapsed[mid - 1] + elapsed[mid]);
        if (oracle) {
            agg.mean_recall = std::accumulate(recalls.begin(), recalls.end(), 0.0) / n;
            agg.min_recall = *std::min_element(recalls.begin(), recalls.end());
        }
        out.aggregates.push_back(agg);
    }
    return out;
}

void BenchConfig::validate() const {
    if (ks.empty()) throw config_error("bench needs at least one k value");
    for (std::size_t k : ks)
        if (k == 0) throw config_error("k must be at least 1");
    if (num_queries == 0) throw config_error("bench needs at least one query");
    BuildConfig probe = build;
    probe.method = BuildMethod::Vbm;  // overlap-managed methods need clustering parameters
    probe.validate();
}

BenchResult run_bench(const std::shared_ptr<const Dataset>& ds, const Dataset& queries, const BenchConfig& cfg) {
    cfg.validate();
    BenchResult out;
    out.query_count = queries.size();
    for (BuildMethod method : {BuildMethod::Vbm, BuildMethod::Dbm, BuildMethod::Obm, BuildMethod::Baseline}) {
        BuildConfig bc = cfg.build;
        bc.method = method;
        BuildOutput built = build_forest(ds, bc);
        MethodBench mb;
        mb.build = built.report;
        mb.plan = built.forest.plan_summary();
        for (const auto& tree : built.forest.trees()) {
            mb.trees.push_back(tree.stats());
            mb.tree_sizes.push_back(tree.size());
        }
        mb.workload = run_queries(built.forest, queries, cfg.ks, cfg.oracle);
        out.methods.push_back(std::move(mb));
    }
    return out;
}

Dataset sample_queries(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    std::vector<ObjectId> ids = ds.all_ids();
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(n, ids.size()));
    std::vector<double> flat;
    for (ObjectId id : ids) {
        auto c = ds.coords(id);
        flat.insert(flat.end(), c.begin(), c.end());
    }
    return Dataset(ds.dimension(), std::move(flat));
}

void GenConfig::validate() const {
    if (clusters == 0) throw config_error("need at least one cluster");
    if (points == 0) throw config_error("need at least one point");
    if (dimension == 0) throw config_error("dimension must be at least 1");
    if (!(spread > 0.0)) throw config_error("spread must be positive");
}

namespace {

Dataset draw(const GenConfig& cfg, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, cfg.spread);
    std::vector<double> flat;
    flat.reserve(n * cfg.dimension);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % cfg.clusters;
        for (std::size_t j = 0; j < cfg.dimension; ++j) {
            const double center = (j == c % cfg.dimension)
                                      ? cfg.separation * static_cast<double>(c / cfg.dimension + 1)
                                      : 0.0;
            flat.push_back(center + noise(rng));
        }
    }
    return Dataset(cfg.dimension, std::move(flat));
}

} // namespace

Dataset generate_clusters(const GenConfig& cfg) { return draw(cfg, cfg.points, cfg.seed); }

Dataset generate_cluster_queries(const GenConfig& cfg, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw config_error("need at least one query");
    return draw(cfg, n, seed);
}

} // namespace ballidx
