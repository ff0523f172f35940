#include "ballidx/report.hpp"

#include <ostream>

namespace ballidx {

using nlohmann::json;

json to_json(const CostCounters& c) {
    return {{"distances", c.distance_count}, {"comparisons", c.comparison_count}};
}

json to_json(const TreeStats& s) {
    json hist = json::array();
    for (const auto& [size, count] : s.bucket_histogram) hist.push_back({{"bucket_size", size}, {"leaves", count}});
    return {{"height", s.height},
            {"internal_nodes", s.internal_nodes},
            {"leaves", s.leaves},
            {"oversized_leaves", s.oversized_leaves},
            {"bucket_histogram", hist},
            {"nodes_per_level", s.nodes_per_level}};
}

json to_json(const PlanSummary& s) {
    json j = json::object();
    for (const auto& [name, field] : plan_summary_fields()) j[std::string(name)] = s.*field;
    j["round_cap_hit"] = s.round_cap_hit;
    return j;
}

json to_json(const OverlapReport& r) {
    json j{{"method", to_string(r.method)},
           {"regime", to_string(r.regime)},
           {"rate", r.rate},
           {"raw_rate", r.raw_rate}};
    switch (r.method) {
    case OverlapMethod::Vbm:
        j["cap_volumes"] = {r.cap_volume_1, r.cap_volume_2};
        j["lens_volume"] = r.lens_volume;
        break;
    case OverlapMethod::Dbm: j["cap_heights"] = {r.cap_height_1, r.cap_height_2}; break;
    case OverlapMethod::Obm: j["shared_objects"] = r.shared_objects; break;
    }
    return j;
}

namespace {

json row_json(const QueryRow& r) {
    json j{{"query", r.query},
           {"k", r.k},
           {"distances", r.distances},
           {"comparisons", r.comparisons},
           {"elapsed_seconds", r.elapsed_seconds},
           {"trees", r.trees}};
    if (r.recall) j["recall"] = *r.recall;
    return j;
}

json aggregate_json(const QueryAggregate& a) {
    json j{{"k", a.k},
           {"queries", a.queries},
           {"mean_distances", a.mean_distances},
           {"mean_comparisons", a.mean_comparisons},
           {"mean_elapsed_seconds", a.mean_elapsed_seconds},
           {"median_elapsed_seconds", a.median_elapsed_seconds},
           {"mean_trees_searched", a.mean_trees_searched}};
    if (a.mean_recall) j["mean_recall"] = *a.mean_recall;
    if (a.min_recall) j["min_recall"] = *a.min_recall;
    return j;
}

json header(std::string_view kind) {
    return {{"schema", kStatsSchema}, {"schema_version", kStatsSchemaVersion}, {"kind", kind}};
}

json trees_json(const Forest& forest) {
    json trees = json::array();
    for (std::size_t t = 0; t < forest.trees().size(); ++t) {
        const auto& tree = forest.trees()[t];
        json j = to_json(tree.stats());
        j["id"] = t;
        j["kind"] = to_string(tree.kind());
        j["objects"] = tree.size();
        j["bucket_capacity"] = tree.capacity();
        j["radius"] = tree.radius();
        j["neighbors"] = forest.neighbors(t);
        trees.push_back(std::move(j));
    }
    return trees;
}

json build_json(const BuildReport& r) {
    return {{"method", to_string(r.method)},
            {"objects", r.objects},
            {"dimension", r.dimension},
            {"clusters", r.clusters},
            {"noise", r.noise},
            {"costs",
             {{"clustering", to_json(r.costs.clustering)},
              {"planning", to_json(r.costs.planning)},
              {"indexing", to_json(r.costs.indexing)},
              {"total", to_json(r.costs.total())}}},
            {"elapsed_seconds", r.elapsed_seconds}};
}

} // namespace

json to_json(const QueryWorkload& w, bool include_rows) {
    json j{{"aggregates", json::array()}};
    for (const auto& a : w.aggregates) j["aggregates"].push_back(aggregate_json(a));
    if (include_rows) {
        j["rows"] = json::array();
        for (const auto& r : w.rows) j["rows"].push_back(row_json(r));
    }
    return j;
}

json build_stats(const Forest& forest, const BuildReport& report) {
    json j = header("build");
    j["build"] = build_json(report);
    j["metric"] = forest.metric().name();
    j["plan"] = to_json(forest.plan_summary());
    j["trees"] = trees_json(forest);
    return j;
}

json query_stats(const Forest& forest, const QueryWorkload& workload) {
    json j = header("query");
    j["method"] = to_string(forest.method());
    j["trees"] = forest.trees().size();
    j["workload"] = to_json(workload);
    return j;
}

json bench_stats(const BenchResult& bench) {
    json j = header("bench");
    j["queries"] = bench.query_count;
    j["methods"] = json::array();
    for (const auto& m : bench.methods) {
        json trees = json::array();
        for (std::size_t t = 0; t < m.trees.size(); ++t) {
            json tj = to_json(m.trees[t]);
            tj["objects"] = m.tree_sizes[t];
            trees.push_back(std::move(tj));
        }
        j["methods"].push_back({{"method", to_string(m.build.method)},
                                {"build", build_json(m.build)},
                                {"plan", to_json(m.plan)},
                                {"trees", trees},
                                {"workload", to_json(m.workload, false)}});
    }
    return j;
}

void write_rows_csv(std::ostream& out, std::string_view method, const QueryWorkload& w, bool header_line) {
    if (header_line) out << "method,k,query,distances,comparisons,elapsed_seconds,trees,recall\n";
    for (const auto& r : w.rows) {
        out << method << ',' << r.k << ',' << r.query << ',' << r.distances << ',' << r.comparisons << ','
            << r.elapsed_seconds << ',';
        for (std::size_t i = 0; i < r.trees.size(); ++i) out << (i ? ";" : "") << r.trees[i];
        out << ',';
        if (r.recall) out << *r.recall;
        out << '\n';
    }
}

} // namespace ballidx
