#include "ballidx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ballidx/forest_io.hpp"
#include "ballidx/geometry.hpp"
#include "ballidx/oracles.hpp"

namespace ballidx::verify {

namespace {

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

Check make(std::string name, bool pass, std::string detail) { return {std::move(name), pass, std::move(detail)}; }

} // namespace

Check lens_closed_form(std::size_t n, std::size_t pairs, std::uint64_t seed, double rel_tol) {
    double worst = 0.0;
    for (const auto& p : oracle::random_ball_pairs(n, pairs, Regime::PartialOverlap, seed)) {
        const double got = vbm_rate(p.first, p.second, p.dist).lens_volume;
        worst = std::max(worst, rel_err(got, oracle::closed_form_lens_2d_3d(p.first, p.second, p.dist)));
    }
    return make("lens closed form n=" + std::to_string(n), worst <= rel_tol,
                std::to_string(pairs) + " pairs, max rel err " + fmt(worst) + " (tol " + fmt(rel_tol) + ")");
}

Check lens_monte_carlo(std::size_t n, std::size_t pairs, std::size_t samples, std::uint64_t seed, double rel_tol) {
    double worst = 0.0, worst_sigma = 0.0;
    std::uint64_t mc_seed = seed;
    for (const auto& p : oracle::random_ball_pairs(n, pairs, Regime::PartialOverlap, seed, 0.05, 0.5)) {
        const double got = vbm_rate(p.first, p.second, p.dist).lens_volume;
        const auto est = oracle::mc_lens_volume(p.first, p.second, {samples, ++mc_seed});
        worst = std::max(worst, rel_err(got, est.value));
        worst_sigma = std::max(worst_sigma, est.stderr_ / est.value);
    }
    return make("lens monte carlo n=" + std::to_string(n), worst <= rel_tol,
                std::to_string(pairs) + " pairs x " + std::to_string(samples) + " samples, max rel err " +
                    fmt(worst) + " (tol " + fmt(rel_tol) + ", max rel stderr " + fmt(worst_sigma) + ")");
}

Check ball_volume_recurrence(std::size_t max_n, double rel_tol) {
    double worst = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n)
        for (double r : {0.25, 1.0, 3.5})
            worst = std::max(worst, rel_err(ball_volume(n, r), oracle::recurrence_ball_volume(n, r)));
    return make("ball volume recurrence", worst <= rel_tol,
                "n=1.." + std::to_string(max_n) + ", max rel err " + fmt(worst));
}

Check sin_power_quadrature(unsigned max_n, double abs_tol) {
    double worst = 0.0;
    for (unsigned n = 0; n <= max_n; ++n)
        for (int i = 0; i <= 16; ++i) {
            const double phi = std::numbers::pi * i / 16.0;
            worst = std::max(worst, std::abs(sin_power_integral(n, phi) - oracle::quad_sin_power(n, phi)));
        }
    return make("sin power integral", worst <= abs_tol,
                "n=0.." + std::to_string(max_n) + ", max abs err " + fmt(worst));
}

Check regime_cases(std::size_t pairs, std::uint64_t seed) {
    std::size_t failures = 0, evaluated = 0;
    const DistanceFn fn = DistanceFn::euclidean();
    for (auto [regime, want] : {std::pair{Regime::Disjoint, 0.0}, std::pair{Regime::Containment, 1.0}}) {
        std::size_t drawn = 0;
        for (std::size_t n = 1; drawn < pairs; n = n % 8 + 1) {
            const std::size_t batch = std::min<std::size_t>(pairs - drawn, 25);
            for (const auto& p : oracle::random_ball_pairs(n, batch, regime, seed + drawn * 131 + n)) {
                const Dataset ds = Dataset::from_rows({p.first.center, p.second.center});
                const Partition a{1, {0}, p.first.center, p.first.radius};
                const Partition b{2, {1}, p.second.center, p.second.radius};
                CostCounters cc;
                const double rates[] = {vbm_rate(p.first, p.second, p.dist).rate,
                                        dbm_rate(p.first, p.second, p.dist).rate,
                                        obm_rate(ds, a, b, p.dist, fn, cc).rate};
                for (double r : rates) {
                    ++evaluated;
                    if (r != want) ++failures;
                }
            }
            drawn += batch;
        }
    }
    return make("regime cases", failures == 0,
                std::to_string(evaluated) + " rates over " + std::to_string(2 * pairs) + " pairs, " +
                    std::to_string(failures) + " not exactly 0/1");
}

Check cap_sum(std::size_t pairs, std::uint64_t seed, double rel_tol) {
    double worst = 0.0;
    std::size_t drawn = 0;
    for (std::size_t n = 2; drawn < pairs; n = n % 8 + 2) {
        const std::size_t batch = std::min<std::size_t>(pairs - drawn, 50);
        for (const auto& p : oracle::random_ball_pairs(n, batch, Regime::PartialOverlap, seed + drawn)) {
            const double h1 = cap_geometry(p.first, p.second, p.dist).height;
            const double h2 = cap_geometry(p.second, p.first, p.dist).height;
            worst = std::max(worst, rel_err(h1 + h2, p.first.radius + p.second.radius - p.dist));
        }
        drawn += batch;
    }
    return make("cap sum identity", worst <= rel_tol,
                std::to_string(pairs) + " pairs, max rel err " + fmt(worst) + " (tol " + fmt(rel_tol) + ")");
}

Check tree_exactness(const std::vector<std::size_t>& dims, std::size_t points, std::size_t queries,
                     const std::vector<std::size_t>& ks, std::uint64_t seed) {
    std::size_t mismatches = 0, searches = 0;
    const DistanceFn fn = DistanceFn::euclidean();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t dim : dims) {
        std::vector<double> flat(points * dim), qflat(queries * dim);
        for (auto& v : flat) v = unit(rng);
        for (auto& v : qflat) v = unit(rng);
        const Dataset ds(dim, std::move(flat));
        const Dataset qs(dim, std::move(qflat));

        IndexGroup group;
        group.members = ds.all_ids();
        CostCounters cc;
        const GhTree tree = GhTree::build(group, ds, fn, cc);
        for (ObjectId qi = 0; qi < qs.size(); ++qi) {
            const auto q = qs.coords(qi);
            for (std::size_t k : ks) {
                ++searches;
                const double r0 = tree.estimate_query_radius(ds, q, k, fn, cc);
                const auto got = tree.knn_search(ds, q, k, fn, cc, r0);
                const auto want = oracle::brute_knn(ds, q, k);
                bool same = got.size() == want.size();
                for (std::size_t i = 0; same && i < got.size(); ++i)
                    same = std::abs(got[i].distance - want[i].distance) <= 1e-12;
                if (!same) ++mismatches;
            }
        }
    }
    return make("tree search exactness", mismatches == 0,
                std::to_string(searches) + " searches, " + std::to_string(mismatches) + " mismatches");
}

Check forest_structure(const Forest& forest) {
    const std::size_t n = forest.dataset().size();
    std::vector<std::size_t> seen(n, 0);
    std::size_t failed_audits = 0;
    for (const auto& tree : forest.trees()) {
        for (ObjectId id : tree.members()) ++seen[id];
        if (!tree.audit(forest.dataset(), forest.metric()).ok) ++failed_audits;
    }
    const auto bad = static_cast<std::size_t>(std::count_if(seen.begin(), seen.end(), [](auto c) { return c != 1; }));
    return make("forest structure", bad == 0 && failed_audits == 0,
                std::to_string(forest.trees().size()) + " trees, " + std::to_string(failed_audits) +
                    " failed audits, " + std::to_string(bad) + " objects not in exactly one tree");
}

Check forest_recall(const Forest& forest, const Dataset& queries, std::size_t k, double min_recall) {
    double sum = 0.0, worst = 1.0;
    for (ObjectId qi = 0; qi < queries.size(); ++qi) {
        const auto q = queries.coords(qi);
        const double r = recall_at_k(forest_knn(forest, q, k).hits, oracle::brute_knn(forest.dataset(), q, k));
        sum += r;
        worst = std::min(worst, r);
    }
    const double mean = queries.empty() ? 1.0 : sum / static_cast<double>(queries.size());
    return make("forest recall@" + std::to_string(k) + " " + std::string(to_string(forest.method())),
                worst >= min_recall,
                std::to_string(queries.size()) + " queries, mean " + fmt(mean) + ", min " + fmt(worst));
}

Check build_determinism(const std::shared_ptr<const Dataset>& ds, const BuildConfig& cfg) {
    const BuildOutput a = build_forest(ds, cfg);
    const BuildOutput b = build_forest(ds, cfg);
    std::ostringstream sa, sb;
    save_forest(a.forest, sa);
    save_forest(b.forest, sb);
    const bool same_costs = a.report.costs.clustering == b.report.costs.clustering &&
                            a.report.costs.planning == b.report.costs.planning &&
                            a.report.costs.indexing == b.report.costs.indexing;
    const bool same = sa.str() == sb.str() && same_costs;
    return make("plan determinism " + std::string(to_string(cfg.method)), same,
                same ? "identical artifacts and costs" : "repeated builds differ");
}

} // namespace ballidx::verify
