#pragma once

// Seeded generators shared by the unit tests.

#include <atomic>
#include <cmath>
#include <span>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "ballidx/metric.hpp"

namespace fixtures {

using ballidx::Dataset;
using ballidx::Point;

inline Dataset uniform(std::size_t n, std::size_t dim, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> flat(n * dim);
    for (auto& v : flat) v = u(rng);
    return Dataset(dim, std::move(flat));
}

/// `per_blob` Gaussian points around each center.
inline Dataset blobs(const std::vector<Point>& centers, std::size_t per_blob, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<Point> rows;
    for (const auto& c : centers)
        for (std::size_t i = 0; i < per_blob; ++i) {
            Point p = c;
            for (auto& v : p) v += g(rng);
            rows.push_back(std::move(p));
        }
    return Dataset::from_rows(rows);
}

/// 1-D dataset from a list of coordinates.
inline Dataset line(const std::vector<double>& xs) {
    return Dataset(1, xs);
}

inline std::shared_ptr<const Dataset> shared(Dataset ds) { return std::make_shared<const Dataset>(std::move(ds)); }

/// Euclidean metric wrapped as a custom metric that tallies its own calls,
/// independent of CostCounters.
struct TallyMetric {
    std::shared_ptr<std::atomic<std::uint64_t>> calls = std::make_shared<std::atomic<std::uint64_t>>(0);

    ballidx::DistanceFn fn() const {
        auto c = calls;
        return ballidx::DistanceFn::custom("tally", [c](std::span<const double> a, std::span<const double> b) {
            ++*c;
            double acc = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(acc);
        });
    }
};

} // namespace fixtures
