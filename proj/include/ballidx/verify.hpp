#pragma once

// Self-checks comparing production routines against the oracles. Shared by
// the `verify` subcommand and the acceptance tests.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ballidx/forest.hpp"
#include "ballidx/metric.hpp"
#include "ballidx/pipeline.hpp"

namespace ballidx::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Lens volume from cap volumes against the n = 2 / 3 closed forms; passes
/// when every pair agrees within rel_tol.
Check lens_closed_form(std::size_t n, std::size_t pairs, std::uint64_t seed, double rel_tol = 1e-9);

/// Lens volume against Monte Carlo. Pairs are drawn from the middle of the
/// partial-overlap range, where the lens is large enough for the sampler.
Check lens_monte_carlo(std::size_t n, std::size_t pairs, std::size_t samples, std::uint64_t seed,
                       double rel_tol = 0.02);

/// ball_volume against the two-step recurrence for n = 1..max_n.
Check ball_volume_recurrence(std::size_t max_n, double rel_tol = 1e-12);

/// sin_power_integral against adaptive quadrature for n = 0..max_n.
Check sin_power_quadrature(unsigned max_n, double abs_tol = 1e-10);

/// vbm, dbm and obm rates are exactly 0 on disjoint and exactly 1 on
/// containment pairs, `pairs` per regime, dimensions cycling through 1..8.
Check regime_cases(std::size_t pairs, std::uint64_t seed);

/// h1 + h2 = r1 + r2 - d on partial-overlap pairs.
Check cap_sum(std::size_t pairs, std::uint64_t seed, double rel_tol = 1e-9);

/// Builds one tree over `points` uniform points per dimension and compares
/// knn_search with brute force for every query and k (distance multisets).
Check tree_exactness(const std::vector<std::size_t>& dims, std::size_t points, std::size_t queries,
                     const std::vector<std::size_t>& ks, std::uint64_t seed);

/// Per-tree audits and plan conservation: every object in exactly one tree.
Check forest_structure(const Forest& forest);

/// Mean and minimum recall@k of routed search against brute force.
Check forest_recall(const Forest& forest, const Dataset& queries, std::size_t k, double min_recall = 1.0);

/// Two builds with the same configuration produce identical trees and costs.
Check build_determinism(const std::shared_ptr<const Dataset>& ds, const BuildConfig& cfg);

} // namespace ballidx::verify
