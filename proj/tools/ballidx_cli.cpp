#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ballidx/bench.hpp"
#include "ballidx/csv.hpp"
#include "ballidx/forest_io.hpp"
#include "ballidx/pipeline.hpp"
#include "ballidx/report.hpp"
#include "ballidx/verify.hpp"

using namespace ballidx;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Args {
    std::string input;
    std::string method = "vbm";
    double epsilon = 0.0;
    std::size_t min_pts = 1;
    double xi_min = 0.4;
    double xi_max = 0.8;
    std::string metric = "euclidean";
    std::uint64_t seed = 42;
    std::vector<std::size_t> ks;
    std::string queries;
    bool oracle = false;
    std::string out;
    std::string stats;
    std::string csv;
    bool sequential = false;

    GenConfig gen;
    std::size_t gen_queries = 0;
    std::string gen_queries_out;

    std::size_t verify_samples = 1'000'000;
};

BuildConfig build_config(const Args& a) {
    BuildConfig cfg;
    cfg.input_path = a.input;
    cfg.method = parse_build_method(a.method);
    cfg.dbscan = {a.epsilon, a.min_pts};
    cfg.thresholds = {a.xi_min, a.xi_max};
    cfg.metric = a.metric;
    cfg.seed = a.seed;
    cfg.validate();
    return cfg;
}

// "sample:N" draws N members of the dataset; anything else is a CSV path.
Dataset load_queries(const std::string& source, const Dataset& ds, std::uint64_t seed) {
    const std::string prefix = "sample:";
    if (source.rfind(prefix, 0) == 0) {
        std::size_t n = 0;
        try {
            n = std::stoul(source.substr(prefix.size()));
        } catch (const std::exception&) {
            throw config_error("bad query source '" + source + "', expected sample:N");
        }
        if (n == 0) throw config_error("sample:N needs N >= 1");
        return sample_queries(ds, n, seed);
    }
    return read_csv(source);
}

void emit_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    return f;
}

int cmd_gen(const Args& a) {
    GenConfig g = a.gen;
    g.seed = a.seed;
    if (a.out.empty()) throw config_error("gen needs --out");
    write_csv(a.out, generate_clusters(g));
    if (a.gen_queries > 0) {
        if (a.gen_queries_out.empty()) throw config_error("--num-queries needs --queries-out");
        write_csv(a.gen_queries_out, generate_cluster_queries(g, a.gen_queries, a.seed + 1));
    }
    return kExitOk;
}

int cmd_build(const Args& a) {
    const BuildConfig cfg = build_config(a);
    if (a.out.empty()) throw config_error("build needs --out for the forest artifact");
    auto ds = std::make_shared<const Dataset>(read_csv(a.input));
    const BuildOutput built = build_forest(ds, cfg);
    save_forest(built.forest, a.out);
    emit_json(build_stats(built.forest, built.report), a.stats);
    return kExitOk;
}

int cmd_query(const Args& a) {
    if (a.queries.empty()) throw config_error("query needs --queries");
    const Forest forest = load_forest(a.input);
    const Dataset qs = load_queries(a.queries, forest.dataset(), a.seed);
    QueryOptions opts;
    opts.parallel = !a.sequential;
    const QueryWorkload w = run_queries(forest, qs, a.ks, a.oracle, opts);
    emit_json(query_stats(forest, w), a.out);
    if (!a.csv.empty()) {
        auto f = open_out(a.csv);
        write_rows_csv(f, to_string(forest.method()), w);
    }
    return kExitOk;
}

int cmd_bench(const Args& a) {
    BenchConfig cfg;
    Args probe = a;
    probe.method = "vbm";
    cfg.build = build_config(probe);
    if (!a.ks.empty()) cfg.ks = a.ks;
    cfg.oracle = a.oracle;
    auto ds = std::make_shared<const Dataset>(read_csv(a.input));
    const Dataset qs = load_queries(a.queries.empty() ? "sample:100" : a.queries, *ds, a.seed);
    cfg.num_queries = qs.size();
    const BenchResult res = run_bench(ds, qs, cfg);
    emit_json(bench_stats(res), a.out);
    if (!a.csv.empty()) {
        auto f = open_out(a.csv);
        bool header = true;
        for (const auto& m : res.methods) {
            write_rows_csv(f, to_string(m.build.method), m.workload, header);
            header = false;
        }
    }
    return kExitOk;
}

int cmd_verify(const Args& a) {
    std::vector<verify::Check> checks;
    checks.push_back(verify::lens_closed_form(2, 100, a.seed));
    checks.push_back(verify::lens_closed_form(3, 100, a.seed + 1));
    checks.push_back(verify::lens_monte_carlo(5, 5, a.verify_samples, a.seed + 2));
    checks.push_back(verify::ball_volume_recurrence(20));
    checks.push_back(verify::sin_power_quadrature(12));
    checks.push_back(verify::regime_cases(200, a.seed + 3));
    checks.push_back(verify::cap_sum(200, a.seed + 4));
    checks.push_back(verify::tree_exactness({2, 5}, 500, 20, {1, 5, 10}, a.seed + 5));

    if (!a.input.empty()) {
        const BuildConfig cfg = build_config(a);
        auto ds = std::make_shared<const Dataset>(read_csv(a.input));
        const BuildOutput built = build_forest(ds, cfg);
        const Dataset qs = load_queries(a.queries.empty() ? "sample:20" : a.queries, *ds, a.seed);
        checks.push_back(verify::forest_structure(built.forest));
        for (std::size_t k : a.ks.empty() ? std::vector<std::size_t>{10} : a.ks)
            checks.push_back(verify::forest_recall(built.forest, qs, k));
        checks.push_back(verify::build_determinism(ds, cfg));
    }

    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
    }
    return all ? kExitOk : kExitFailed;
}

void add_build_flags(CLI::App* cmd, Args& a) {
    cmd->add_option("--method", a.method, "vbm, dbm, obm or baseline")->capture_default_str();
    cmd->add_option("--epsilon", a.epsilon, "DBSCAN neighbourhood radius");
    cmd->add_option("--minpts", a.min_pts, "DBSCAN core threshold")->capture_default_str();
    cmd->add_option("--xi-min", a.xi_min, "low/medium overlap threshold")->capture_default_str();
    cmd->add_option("--xi-max", a.xi_max, "medium/high overlap threshold")->capture_default_str();
    cmd->add_option("--metric", a.metric, "euclidean, manhattan or chebyshev")->capture_default_str();
}

// Every long flag can also come from BALLIDX_<FLAG>, e.g. --xi-min from BALLIDX_XI_MIN.
void mirror_env(CLI::App& app) {
    for (CLI::Option* opt : app.get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
        std::string env = "BALLIDX_";
        for (char c : opt->get_lnames().front()) env += c == '-' ? '_' : static_cast<char>(std::toupper(c));
        opt->envname(env);
    }
    for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) mirror_env(*sub);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlap-managed metric index forest"};
    app.require_subcommand(1);
    Args a;

    auto* gen = app.add_subcommand("gen", "write a seeded Gaussian-cluster dataset");
    gen->add_option("--out", a.out, "dataset CSV")->required();
    gen->add_option("--clusters", a.gen.clusters)->capture_default_str();
    gen->add_option("--points", a.gen.points)->capture_default_str();
    gen->add_option("--dim", a.gen.dimension)->capture_default_str();
    gen->add_option("--spread", a.gen.spread, "per-axis standard deviation")->capture_default_str();
    gen->add_option("--separation", a.gen.separation, "distance between cluster centers")->capture_default_str();
    gen->add_option("--num-queries", a.gen_queries, "fresh query draws from the same clusters");
    gen->add_option("--queries-out", a.gen_queries_out, "query CSV");
    gen->add_option("--seed", a.seed)->capture_default_str();

    auto* build = app.add_subcommand("build", "cluster, plan and index a CSV dataset");
    build->add_option("--input", a.input, "dataset CSV")->required();
    add_build_flags(build, a);
    build->add_option("--seed", a.seed)->capture_default_str();
    build->add_option("--out", a.out, "forest artifact")->required();
    build->add_option("--stats", a.stats, "stats JSON (stdout when omitted)");

    auto* query = app.add_subcommand("query", "run kNN queries against a saved forest");
    query->add_option("--input", a.input, "forest artifact")->required();
    query->add_option("--queries", a.queries, "query CSV, or sample:N dataset members")->required();
    query->add_option("--k", a.ks, "comma-separated k values")->delimiter(',')->required();
    query->add_flag("--oracle", a.oracle, "compute recall against brute force");
    query->add_option("--seed", a.seed)->capture_default_str();
    query->add_flag("--sequential", a.sequential, "search the selected trees one after another");
    query->add_option("--out", a.out, "stats JSON (stdout when omitted)");
    query->add_option("--csv", a.csv, "per-query rows CSV");

    auto* bench = app.add_subcommand("bench", "build every method and run one shared workload");
    bench->add_option("--input", a.input, "dataset CSV")->required();
    add_build_flags(bench, a);
    bench->add_option("--seed", a.seed)->capture_default_str();
    bench->add_option("--k", a.ks, "comma-separated k values (default 5,10,15,20,50,100)")->delimiter(',');
    bench->add_option("--queries", a.queries, "query CSV, or sample:N (default sample:100)");
    bench->add_flag("--oracle", a.oracle, "compute recall against brute force");
    bench->add_option("--out", a.out, "stats JSON (stdout when omitted)");
    bench->add_option("--csv", a.csv, "per-query rows CSV");

    auto* ver = app.add_subcommand("verify", "check geometry and search against reference implementations");
    ver->add_option("--input", a.input, "optional dataset CSV to build and audit");
    add_build_flags(ver, a);
    ver->add_option("--seed", a.seed)->capture_default_str();
    ver->add_option("--k", a.ks, "k values for the recall check")->delimiter(',');
    ver->add_option("--queries", a.queries, "query CSV, or sample:N (default sample:20)");
    ver->add_option("--samples", a.verify_samples, "Monte Carlo samples per lens")->capture_default_str();

    mirror_env(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*gen) return cmd_gen(a);
        if (*build) return cmd_build(a);
        if (*query) return cmd_query(a);
        if (*bench) return cmd_bench(a);
        if (*ver) return cmd_verify(a);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
        case Error::Kind::Config:
        case Error::Kind::Domain: return kExitConfig;
        case Error::Kind::Data: return kExitData;
        case Error::Kind::Internal: return kExitFailed;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitFailed;
}
