#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ballidx/bench.hpp"
#include "ballidx/forest_io.hpp"
#include "ballidx/pipeline.hpp"
#include "ballidx/report.hpp"
#include "fixtures.hpp"

using namespace ballidx;

namespace {

std::shared_ptr<const Dataset> three_blobs(std::uint64_t seed = 3) {
    return fixtures::shared(fixtures::blobs({{0, 0}, {40, 0}, {0, 40}}, 60, 1.0, seed));
}

BuildConfig blob_config(BuildMethod method) {
    BuildConfig cfg;
    cfg.method = method;
    cfg.dbscan = {1.5, 4};
    return cfg;
}

bool kind_is(Error::Kind kind, auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

} // namespace

TEST_CASE("baseline build indexes everything in one tree") {
    auto ds = fixtures::shared(fixtures::uniform(100, 3, 1));
    BuildConfig cfg;
    cfg.method = BuildMethod::Baseline;
    const BuildOutput out = build_forest(ds, cfg);
    REQUIRE(out.forest.trees().size() == 1);
    CHECK(out.forest.trees()[0].size() == 100);
    CHECK(out.forest.trees()[0].stats().height >= 1);
    CHECK(out.report.clusters == 0);
    CHECK(out.report.costs.clustering.distance_count == 0);
    CHECK(out.report.costs.indexing.distance_count > 0);
}

TEST_CASE("overlap-managed builds on three blobs") {
    auto ds = three_blobs();
    for (auto m : {BuildMethod::Vbm, BuildMethod::Dbm, BuildMethod::Obm}) {
        CAPTURE(to_string(m));
        const BuildOutput out = build_forest(ds, blob_config(m));
        CHECK(out.forest.trees().size() >= 3);
        CHECK(out.report.clusters == 3);
        CHECK(out.forest.plan_summary().input_partitions == 3);
        CHECK(out.forest.plan_summary().disjoint_pairs == 3);
        CHECK(out.report.costs.clustering.distance_count > 0);
        CHECK(out.report.costs.planning.distance_count > 0);
        std::size_t total = 0;
        for (const auto& t : out.forest.trees()) total += t.size();
        CHECK(total == ds->size());
    }
}

TEST_CASE("build config validation") {
    auto ds = three_blobs();
    BuildConfig cfg = blob_config(BuildMethod::Vbm);
    cfg.thresholds = {0.9, 0.1};
    CHECK(kind_is(Error::Kind::Config, [&] { build_forest(ds, cfg); }));

    cfg = blob_config(BuildMethod::Vbm);
    cfg.metric = "cosine";
    CHECK(kind_is(Error::Kind::Config, [&] { build_forest(ds, cfg); }));

    cfg = blob_config(BuildMethod::Dbm);
    cfg.dbscan = {};
    CHECK(kind_is(Error::Kind::Config, [&] { build_forest(ds, cfg); }));

    cfg.method = BuildMethod::Baseline;
    CHECK_NOTHROW(build_forest(ds, cfg));

    CHECK(kind_is(Error::Kind::Data, [&] { build_forest(fixtures::shared(Dataset{}), blob_config(BuildMethod::Vbm)); }));
    CHECK(kind_is(Error::Kind::Config, [] { (void)parse_build_method("kdtree"); }));
}

TEST_CASE("phase costs add up") {
    const BuildOutput out = build_forest(three_blobs(), blob_config(BuildMethod::Vbm));
    const auto& c = out.report.costs;
    const CostCounters t = c.total();
    CHECK(t.distance_count == c.clustering.distance_count + c.planning.distance_count + c.indexing.distance_count);
    CHECK(t.comparison_count ==
          c.clustering.comparison_count + c.planning.comparison_count + c.indexing.comparison_count);
}

TEST_CASE("custom metric build matches its own call tally") {
    auto ds = three_blobs();
    fixtures::TallyMetric tally;
    const BuildOutput out = build_forest(ds, blob_config(BuildMethod::Obm), tally.fn());
    CHECK(out.report.costs.total().distance_count == tally.calls->load());
}

TEST_CASE("repeated builds are identical") {
    auto ds = three_blobs(9);
    for (auto m : {BuildMethod::Vbm, BuildMethod::Dbm, BuildMethod::Obm, BuildMethod::Baseline}) {
        CAPTURE(to_string(m));
        const BuildOutput a = build_forest(ds, blob_config(m));
        const BuildOutput b = build_forest(ds, blob_config(m));
        std::ostringstream sa, sb;
        save_forest(a.forest, sa);
        save_forest(b.forest, sb);
        CHECK(sa.str() == sb.str());
        CHECK(a.report.costs.total().distance_count == b.report.costs.total().distance_count);
        CHECK(a.report.costs.total().comparison_count == b.report.costs.total().comparison_count);
    }
}

TEST_CASE("run_queries row accounting") {
    auto ds = three_blobs();
    const BuildOutput out = build_forest(ds, blob_config(BuildMethod::Vbm));
    const Dataset qs = sample_queries(*ds, 100, 5);
    REQUIRE(qs.size() == 100);

    const std::vector<std::size_t> k5{5};
    const QueryWorkload w = run_queries(out.forest, qs, k5, false);
    CHECK(w.rows.size() == 100);
    REQUIRE(w.aggregates.size() == 1);
    CHECK(w.aggregates[0].queries == 100);
    CHECK_FALSE(w.aggregates[0].mean_recall.has_value());
    for (const auto& r : w.rows) CHECK_FALSE(r.recall.has_value());

    const std::vector<std::size_t> ks{1, 5, 10};
    const QueryWorkload all = run_queries(out.forest, qs, ks, true);
    CHECK(all.rows.size() == 300);
    REQUIRE(all.aggregates.size() == 3);
    for (std::size_t a = 0; a < ks.size(); ++a) {
        double d = 0.0, c = 0.0, t = 0.0, rec = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            const auto& row = all.rows[a * 100 + i];
            CHECK(row.k == ks[a]);
            CHECK(row.query == i);
            REQUIRE(row.recall.has_value());
            CHECK(*row.recall >= 0.0);
            CHECK(*row.recall <= 1.0);
            d += static_cast<double>(row.distances);
            c += static_cast<double>(row.comparisons);
            t += static_cast<double>(row.trees.size());
            rec += *row.recall;
        }
        const auto& agg = all.aggregates[a];
        CHECK(std::abs(agg.mean_distances - d / 100) <= 1e-12 * std::max(1.0, d / 100));
        CHECK(std::abs(agg.mean_comparisons - c / 100) <= 1e-12 * std::max(1.0, c / 100));
        CHECK(std::abs(agg.mean_trees_searched - t / 100) <= 1e-12);
        CHECK(std::abs(*agg.mean_recall - rec / 100) <= 1e-12);
        CHECK(*agg.min_recall <= *agg.mean_recall);
    }
}

TEST_CASE("run_queries is deterministic in its cost columns") {
    auto ds = three_blobs();
    const BuildOutput out = build_forest(ds, blob_config(BuildMethod::Dbm));
    const Dataset qs = sample_queries(*ds, 30, 8);
    const std::vector<std::size_t> ks{3, 10};
    const QueryWorkload a = run_queries(out.forest, qs, ks, false);
    const QueryWorkload b = run_queries(out.forest, qs, ks, false, {.parallel = false});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].distances == b.rows[i].distances);
        CHECK(a.rows[i].comparisons == b.rows[i].comparisons);
        CHECK(a.rows[i].trees == b.rows[i].trees);
    }
}

TEST_CASE("run_queries errors") {
    auto ds = three_blobs();
    const BuildOutput out = build_forest(ds, blob_config(BuildMethod::Vbm));
    const Dataset qs = sample_queries(*ds, 4, 1);
    const std::vector<std::size_t> none, zero{0}, ok{1};
    CHECK(kind_is(Error::Kind::Config, [&] { run_queries(out.forest, qs, none, false); }));
    CHECK(kind_is(Error::Kind::Config, [&] { run_queries(out.forest, qs, zero, false); }));
    CHECK(kind_is(Error::Kind::Data, [&] { run_queries(out.forest, Dataset{}, ok, false); }));

    const Dataset wrong = fixtures::uniform(3, 5, 1);
    try {
        run_queries(out.forest, wrong, ok, false);
        FAIL("dimension mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == Error::Kind::Data);
        const std::string msg = e.what();
        CHECK(msg.find('5') != std::string::npos);
        CHECK(msg.find('2') != std::string::npos);
    }
}

TEST_CASE("bench builds all four methods on one query set") {
    auto ds = three_blobs();
    BenchConfig cfg;
    cfg.build = blob_config(BuildMethod::Baseline);
    cfg.ks = {5, 10};
    cfg.oracle = true;
    const Dataset qs = sample_queries(*ds, 20, 2);
    const BenchResult res = run_bench(ds, qs, cfg);
    REQUIRE(res.methods.size() == 4);
    CHECK(res.query_count == 20);
    CHECK(res.methods[0].build.method == BuildMethod::Vbm);
    CHECK(res.methods[3].build.method == BuildMethod::Baseline);
    for (const auto& m : res.methods) {
        CHECK(m.workload.rows.size() == 40);
        CHECK(m.trees.size() == m.tree_sizes.size());
        for (const auto& a : m.workload.aggregates) CHECK(*a.min_recall == 1.0);
    }
    CHECK(res.methods[3].trees.size() == 1);
}

TEST_CASE("bench config errors") {
    auto ds = three_blobs();
    const Dataset qs = sample_queries(*ds, 5, 2);
    BenchConfig cfg;
    cfg.build = blob_config(BuildMethod::Vbm);
    cfg.ks = {};
    CHECK(kind_is(Error::Kind::Config, [&] { run_bench(ds, qs, cfg); }));
    cfg.ks = {5, 0};
    CHECK(kind_is(Error::Kind::Config, [&] { run_bench(ds, qs, cfg); }));
    cfg.ks = {5};
    cfg.build.dbscan = {};
    CHECK(kind_is(Error::Kind::Config, [&] { run_bench(ds, qs, cfg); }));
}

TEST_CASE("single-cluster input behaves like the baseline") {
    auto ds = fixtures::shared(fixtures::blobs({{0, 0, 0}}, 300, 1.0, 4));
    BenchConfig cfg;
    cfg.build.dbscan = {1.5, 4};
    cfg.ks = {5};
    const Dataset qs = sample_queries(*ds, 20, 6);
    const BenchResult res = run_bench(ds, qs, cfg);
    const double base = res.methods[3].workload.aggregates[0].mean_distances;
    for (std::size_t m = 0; m < 3; ++m) {
        CAPTURE(m);
        CHECK(res.methods[m].trees.size() == 1);
        // One tree over the same objects; only the pivots differ.
        CHECK(res.methods[m].workload.aggregates[0].mean_distances <= base * 1.5 + 10);
        CHECK(res.methods[m].workload.aggregates[0].mean_distances >= base / 1.5 - 10);
    }
}

TEST_CASE("stats documents carry the schema header") {
    auto ds = three_blobs();
    const BuildOutput out = build_forest(ds, blob_config(BuildMethod::Vbm));
    const auto b = build_stats(out.forest, out.report);
    CHECK(b["schema"] == kStatsSchema);
    CHECK(b["schema_version"] == kStatsSchemaVersion);
    CHECK(b["kind"] == "build");
    CHECK(b["build"]["method"] == "vbm");
    CHECK(b["build"]["costs"]["total"]["distances"] == out.report.costs.total().distance_count);
    CHECK(b["plan"]["input_partitions"] == 3);
    CHECK(b["trees"].size() == out.forest.trees().size());
    for (const auto& t : b["trees"]) {
        CHECK(t.contains("neighbors"));
        CHECK(t.contains("height"));
        CHECK(t.contains("bucket_histogram"));
    }

    const Dataset qs = sample_queries(*ds, 10, 1);
    const std::vector<std::size_t> ks{5};
    const auto q = query_stats(out.forest, run_queries(out.forest, qs, ks, true));
    CHECK(q["kind"] == "query");
    CHECK(q["workload"]["rows"].size() == 10);
    CHECK(q["workload"]["aggregates"][0]["mean_recall"] == 1.0);

    BenchConfig cfg;
    cfg.build = blob_config(BuildMethod::Vbm);
    cfg.ks = {5};
    const auto bj = bench_stats(run_bench(ds, qs, cfg));
    CHECK(bj["kind"] == "bench");
    REQUIRE(bj["methods"].size() == 4);
    CHECK(bj["methods"][3]["method"] == "baseline");
    CHECK_FALSE(bj["methods"][0]["workload"].contains("rows"));
}

TEST_CASE("rows csv") {
    QueryWorkload w;
    QueryRow r;
    r.query = 2;
    r.k = 5;
    r.distances = 40;
    r.comparisons = 70;
    r.trees = {0, 3};
    w.rows.push_back(r);
    r.recall = 0.8;
    r.trees = {1};
    w.rows.push_back(r);
    std::ostringstream os;
    write_rows_csv(os, "dbm", w);
    CHECK(os.str() ==
          "method,k,query,distances,comparisons,elapsed_seconds,trees,recall\n"
          "dbm,5,2,40,70,0,0;3,\n"
          "dbm,5,2,40,70,0,1,0.8\n");
}

TEST_CASE("sample_queries draws distinct members") {
    const Dataset ds = fixtures::uniform(50, 2, 3);
    const Dataset qs = sample_queries(ds, 20, 1);
    CHECK(qs.size() == 20);
    std::set<std::vector<double>> seen;
    for (ObjectId i = 0; i < qs.size(); ++i) seen.insert(qs.point(i));
    CHECK(seen.size() == 20);
    for (const auto& p : seen) {
        bool found = false;
        for (ObjectId j = 0; j < ds.size() && !found; ++j) found = ds.point(j) == p;
        CHECK(found);
    }
    CHECK(sample_queries(ds, 500, 1).size() == 50);
    CHECK(sample_queries(ds, 20, 1).raw() == qs.raw());
}

TEST_CASE("cluster generator") {
    GenConfig g;
    g.points = 300;
    g.dimension = 2;
    g.clusters = 3;
    g.separation = 30;
    const Dataset ds = generate_clusters(g);
    CHECK(ds.size() == 300);
    CHECK(ds.dimension() == 2);
    CHECK(generate_clusters(g).raw() == ds.raw());

    // Cluster 2 wraps onto axis 0 at twice the separation.
    double sx = 0, sy = 0;
    for (ObjectId i = 2; i < 300; i += 3) {
        sx += ds.coords(i)[0];
        sy += ds.coords(i)[1];
    }
    CHECK(sx / 100 == doctest::Approx(60).epsilon(0.02));
    CHECK(std::abs(sy / 100) < 0.5);

    const Dataset qs = generate_cluster_queries(g, 10, 99);
    CHECK(qs.size() == 10);
    CHECK(qs.coords(0)[0] != ds.coords(0)[0]);

    g.spread = 0;
    CHECK(kind_is(Error::Kind::Config, [&] { generate_clusters(g); }));
    g.spread = 1;
    CHECK(kind_is(Error::Kind::Config, [&] { generate_cluster_queries(g, 0, 1); }));
}
