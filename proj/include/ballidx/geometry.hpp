#pragma once

#include <cstddef>
#include <string_view>

#include "ballidx/metric.hpp"
#include "ballidx/partition.hpp"

namespace ballidx {

/// Closed ball in R^n.
struct Ball {
    Point center;
    double radius = 0.0;

    std::size_t dimension() const noexcept { return center.size(); }
};

enum class Regime { Disjoint, PartialOverlap, Containment };

enum class OverlapMethod { Vbm, Dbm, Obm };

std::string_view to_string(Regime r) noexcept;
std::string_view to_string(OverlapMethod m) noexcept;
OverlapMethod parse_overlap_method(std::string_view name);

/// Case cascade shared by all three overlap heuristics: Disjoint is tested
/// first (dist >= r1 + r2), then Containment (dist <= |r1 - r2|). Two
/// zero-radius balls at the same point are the one exception and resolve to
/// Containment.
Regime classify_regime(double r1, double r2, double dist) noexcept;

/// Result of scoring one pair of balls. Fields not relevant to the method
/// stay at zero.
struct OverlapReport {
    OverlapMethod method = OverlapMethod::Vbm;
    Regime regime = Regime::Disjoint;
    double rate = 0.0;      ///< min(raw_rate, 1)
    double raw_rate = 0.0;  ///< before clamping; DBM can exceed 1

    double cap_height_1 = 0.0;
    double cap_height_2 = 0.0;
    double cap_volume_1 = 0.0;
    double cap_volume_2 = 0.0;
    double lens_volume = 0.0;  ///< absolute intersection volume (VBM)
    std::size_t shared_objects = 0;  ///< |A| (OBM)
};

/// Gamma function for x > 0.
double gamma(double x);

/// n-volume of a ball of radius r: pi^(n/2) / Gamma(n/2 + 1) * r^n.
double ball_volume(std::size_t n, double r);
inline double ball_volume(const Ball& b) { return ball_volume(b.dimension(), b.radius); }

/// Integral of sin^n over [0, phi] by the reduction
/// I_n = ((n-1)/n) I_{n-2} - cos(phi) sin^(n-1)(phi) / n, I_0 = phi, I_1 = 1 - cos(phi).
double sin_power_integral(unsigned n, double phi);

struct CapGeometry {
    double theta = 0.0;   ///< polar angle of the cap, in [0, pi]
    double height = 0.0;  ///< r (1 - cos theta)
};

/// Cap cut from ball i by the radical hyperplane of the pair (ri, rj, dist).
/// Requires the partial-overlap regime.
CapGeometry cap_geometry(double ri, double rj, double dist);
inline CapGeometry cap_geometry(const Ball& bi, const Ball& bj, double dist) {
    return cap_geometry(bi.radius, bj.radius, dist);
}

/// n-volume of the cap of polar angle theta on a ball of radius r:
/// pi^((n-1)/2) r^n / Gamma((n+1)/2) * I_n(theta).
double cap_volume(std::size_t n, double r, double theta);
inline double cap_volume(const Ball& b, double theta) { return cap_volume(b.dimension(), b.radius, theta); }

/// Volume-based overlap rate: lens volume over the sum of ball volumes.
OverlapReport vbm_rate(const Ball& b1, const Ball& b2, double dist);

/// Distance-based overlap rate: (h1 + h2) / dist.
OverlapReport dbm_rate(const Ball& b1, const Ball& b2, double dist);

/// Object-based overlap rate: |A| / (|P1| + |P2|), where A holds the members
/// of either partition lying inside both balls. Membership tests are only run
/// in the partial regime.
OverlapReport obm_rate(const Dataset& ds, const Partition& p1, const Partition& p2, double dist,
                       const DistanceFn& fn, CostCounters& counters);

} // namespace ballidx
