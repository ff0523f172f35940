#include "ballidx/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

namespace ballidx::oracle {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

std::vector<Hit> brute_knn(const Dataset& ds, std::span<const double> q, std::size_t k,
                           std::span<const ObjectId> ids) {
    std::vector<Hit> all;
    if (ids.empty()) {
        for (ObjectId id = 0; id < ds.size(); ++id) all.push_back({id, euclidean(q, ds.coords(id))});
    } else {
        for (ObjectId id : ids) all.push_back({id, euclidean(q, ds.coords(id))});
    }
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end());
    all.resize(keep);
    return all;
}

Estimate mc_lens_volume(const Ball& b1, const Ball& b2, const OracleConfig& cfg) {
    const double dist = euclidean(b1.center, b2.center);
    if (dist >= b1.radius + b2.radius) return {};
    const Ball& small = b1.radius <= b2.radius ? b1 : b2;
    const std::size_t n = small.center.size();

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> x(n);
    std::size_t inside = 0;
    for (std::size_t s = 0; s < cfg.mc_samples; ++s) {
        for (std::size_t j = 0; j < n; ++j) x[j] = small.center[j] + small.radius * unit(rng);
        if (euclidean(x, b1.center) <= b1.radius && euclidean(x, b2.center) <= b2.radius) ++inside;
    }
    const double box = std::pow(2.0 * small.radius, static_cast<double>(n));
    const double p = static_cast<double>(inside) / static_cast<double>(cfg.mc_samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.mc_samples))};
}

Estimate mc_ball_volume(std::size_t n, double r, const OracleConfig& cfg) {
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::size_t inside = 0;
    for (std::size_t s = 0; s < cfg.mc_samples; ++s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = unit(rng);
            acc += t * t;
        }
        if (acc <= 1.0) ++inside;
    }
    const double box = std::pow(2.0 * r, static_cast<double>(n));
    const double p = static_cast<double>(inside) / static_cast<double>(cfg.mc_samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.mc_samples))};
}

double recurrence_ball_volume(std::size_t n, double r) {
    double v = (n % 2 == 0) ? 1.0 : 2.0;
    for (std::size_t m = (n % 2 == 0) ? 2 : 3; m <= n; m += 2) v *= 2.0 * std::numbers::pi / static_cast<double>(m);
    return v * std::pow(r, static_cast<double>(n));
}

double closed_form_lens_2d_3d(const Ball& b1, const Ball& b2, double d) {
    const std::size_t n = b1.center.size();
    const double r1 = b1.radius, r2 = b2.radius;
    if (n != 2 && n != 3) throw domain_error("closed-form lens only exists here for n = 2 or 3");
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return n == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
    }
    if (n == 2) {
        // Sum of two circular segments.
        const double a1 = r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
        const double a2 = r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
        const double tri = 0.5 * std::sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
        return a1 + a2 - tri;
    }
    // Two spherical caps whose heights follow from the plane of intersection.
    const double x1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double h1 = r1 - x1;
    const double h2 = r2 - (d - x1);
    auto cap = [](double r, double h) { return std::numbers::pi * h * h * (3.0 * r - h) / 3.0; };
    return cap(r1, h1) + cap(r2, h2);
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

template <class F>
double adaptive(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double quad_sin_power(unsigned n, double phi, double tol) {
    auto f = [n](double t) { return std::pow(std::sin(t), static_cast<double>(n)); };
    if (phi == 0.0) return 0.0;
    const double fa = f(0.0), fm = f(phi / 2.0), fb = f(phi);
    return adaptive(f, 0.0, phi, fa, fm, fb, simpson(fa, fm, fb, 0.0, phi), tol, 50);
}

std::vector<int> reference_dbscan(const Dataset& ds, double eps, std::size_t min_pts) {
    const std::size_t n = ds.size();
    std::vector<std::vector<ObjectId>> nbrs(n);
    for (ObjectId i = 0; i < n; ++i)
        for (ObjectId j = 0; j < n; ++j)
            if (euclidean(ds.coords(i), ds.coords(j)) <= eps) nbrs[i].push_back(j);

    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_pts;

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (ObjectId j : nbrs[i])
            if (core[j]) parent[find(i)] = find(j);
    }

    std::vector<long> root_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            root_of[i] = static_cast<long>(find(i));
            continue;
        }
        for (ObjectId j : nbrs[i]) {  // ascending ids: lowest core neighbour wins
            if (core[j]) {
                root_of[i] = static_cast<long>(find(j));
                break;
            }
        }
    }

    std::map<long, int> label_of_root;
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (root_of[i] < 0) continue;
        auto [it, fresh] = label_of_root.try_emplace(root_of[i], static_cast<int>(label_of_root.size()) + 1);
        labels[i] = it->second;
    }
    return labels;
}

std::vector<BallPair> random_ball_pairs(std::size_t n, std::size_t count, Regime regime, std::uint64_t seed,
                                        double band_lo, double band_hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_real_distribution<double> radius(0.5, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> band(band_lo, band_hi);
    std::normal_distribution<double> gauss;

    std::vector<BallPair> out;
    while (out.size() < count) {
        BallPair p;
        p.first.center.resize(n);
        for (auto& c : p.first.center) c = coord(rng);
        p.first.radius = radius(rng);
        p.second.radius = radius(rng);
        const double r1 = p.first.radius, r2 = p.second.radius;
        const double lo = std::abs(r1 - r2), hi = r1 + r2;
        switch (regime) {
        case Regime::Disjoint: p.dist = hi * (1.0 + unit(rng)); break;
        case Regime::Containment: p.dist = lo * unit(rng); break;
        case Regime::PartialOverlap: p.dist = lo + (hi - lo) * band(rng); break;
        }
        if (regime == Regime::PartialOverlap && !(p.dist > lo && p.dist < hi)) continue;

        std::vector<double> dir(n);
        double norm = 0.0;
        for (auto& v : dir) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        p.second.center.resize(n);
        for (std::size_t j = 0; j < n; ++j) p.second.center[j] = p.first.center[j] + p.dist * dir[j] / norm;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::vector<ObjectId>> label_partition(const std::vector<int>& labels) {
    std::map<int, std::vector<ObjectId>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != 0) groups[labels[i]].push_back(static_cast<ObjectId>(i));
    std::vector<std::vector<ObjectId>> out;
    for (auto& [_, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace ballidx::oracle
