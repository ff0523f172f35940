#pragma once

// Reference implementations used to check the production code. Nothing in
// here calls the production geometry, clustering or search routines; only
// the plain data types are shared.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ballidx/geometry.hpp"
#include "ballidx/ghtree.hpp"
#include "ballidx/metric.hpp"

namespace ballidx::oracle {

struct OracleConfig {
    std::size_t mc_samples = 1'000'000;
    std::uint64_t rng_seed = 0x5eed;
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Euclidean distance computed locally, independent of DistanceFn.
double euclidean(std::span<const double> a, std::span<const double> b);

/// Linear scan over `ids` (all objects when empty), sorted by (distance, id), cut to k.
std::vector<Hit> brute_knn(const Dataset& ds, std::span<const double> q, std::size_t k,
                           std::span<const ObjectId> ids = {});

/// Rejection sampling of the two-ball intersection, uniform in the bounding
/// box of the smaller ball. Disjoint pairs return 0 +- 0.
Estimate mc_lens_volume(const Ball& b1, const Ball& b2, const OracleConfig& cfg);

/// Rejection sampling of a ball in its bounding cube.
Estimate mc_ball_volume(std::size_t n, double r, const OracleConfig& cfg);

/// Unit-ball volume by V_n = 2 pi / n * V_{n-2}, V_0 = 1, V_1 = 2, times r^n.
double recurrence_ball_volume(std::size_t n, double r);

/// Circular lens (n = 2) or spherical lens (n = 3) closed forms for balls
/// in partial overlap; throws for other n.
double closed_form_lens_2d_3d(const Ball& b1, const Ball& b2, double dist);

/// Adaptive Simpson quadrature of sin^n over [0, phi].
double quad_sin_power(unsigned n, double phi, double tol = 1e-12);

/// DBSCAN via union-find over core points; border points join the cluster of
/// their lowest-id core neighbour. Returns one label per object, 0 for noise,
/// clusters numbered from 1 in order of their lowest member id.
std::vector<int> reference_dbscan(const Dataset& ds, double eps, std::size_t min_pts);

struct BallPair {
    Ball first;
    Ball second;
    double dist = 0.0;  ///< intended center distance; the centers are placed to match it
};

/// Seeded pairs of n-balls in the requested regime. Radii lie in [0.5, 5].
/// For partial overlap, the center distance sits at a fraction in
/// [band_lo, band_hi] of the way from |r1 - r2| to r1 + r2.
std::vector<BallPair> random_ball_pairs(std::size_t n, std::size_t count, Regime regime, std::uint64_t seed,
                                        double band_lo = 0.0, double band_hi = 1.0);

/// Canonical form of a labelling: member lists of each non-noise label, sorted.
std::vector<std::vector<ObjectId>> label_partition(const std::vector<int>& labels);

} // namespace ballidx::oracle
