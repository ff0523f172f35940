#include "ballidx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ballidx {

std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::Disjoint: return "disjoint";
    case Regime::PartialOverlap: return "partial";
    case Regime::Containment: return "containment";
    }
    return "?";
}

std::string_view to_string(OverlapMethod m) noexcept {
    switch (m) {
    case OverlapMethod::Vbm: return "vbm";
    case OverlapMethod::Dbm: return "dbm";
    case OverlapMethod::Obm: return "obm";
    }
    return "?";
}

OverlapMethod parse_overlap_method(std::string_view name) {
    if (name == "vbm") return OverlapMethod::Vbm;
    if (name == "dbm") return OverlapMethod::Dbm;
    if (name == "obm") return OverlapMethod::Obm;
    throw config_error("unknown overlap method '" + std::string(name) + "'");
}

Regime classify_regime(double r1, double r2, double dist) noexcept {
    if (r1 == 0.0 && r2 == 0.0 && dist == 0.0) return Regime::Containment;
    if (dist >= r1 + r2) return Regime::Disjoint;
    if (dist <= std::abs(r1 - r2)) return Regime::Containment;
    return Regime::PartialOverlap;
}

double gamma(double x) {
    if (!(x > 0.0)) throw domain_error("gamma: argument must be positive");
    return std::tgamma(x);
}

double ball_volume(std::size_t n, double r) {
    if (n == 0) throw domain_error("ball_volume: dimension must be at least 1");
    if (r < 0.0) throw domain_error("ball_volume: negative radius");
    if (r == 0.0) return 0.0;
    const double dn = static_cast<double>(n);
    return std::pow(std::numbers::pi, dn / 2.0) / gamma(dn / 2.0 + 1.0) * std::pow(r, dn);
}

namespace {

// sin^n integral as a series in s = sin(phi), for phi <= pi/2:
// sum_k C(2k,k)/4^k * s^(n+2k+1) / (n+2k+1). Avoids the cancellation the
// reduction formula suffers at small angles.
double sin_power_series(unsigned n, double phi) {
    const double s = std::sin(phi);
    const double s2 = s * s;
    double coef = 1.0;
    double term_pow = std::pow(s, static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (unsigned k = 0; k < 400; ++k) {
        const double add = coef * term_pow / (static_cast<double>(n + 2 * k) + 1.0);
        sum += add;
        if (add <= sum * 1e-17) break;
        coef *= (2.0 * k + 1.0) / (2.0 * k + 2.0);
        term_pow *= s2;
    }
    return sum;
}

} // namespace

double sin_power_integral(unsigned n, double phi) {
    if (!(phi >= 0.0 && phi <= std::numbers::pi))
        throw domain_error("sin_power_integral: phi outside [0, pi]");
    if (n >= 2 && phi <= std::numbers::pi / 4) return sin_power_series(n, phi);
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    // Run the reduction up from whichever base case shares n's parity.
    double value = (n % 2 == 0) ? phi : 2.0 * std::pow(std::sin(phi / 2.0), 2);
    double s_pow = (n % 2 == 0) ? s : s * s;  // sin^(m-1) for the next m
    for (unsigned m = (n % 2 == 0) ? 2 : 3; m <= n; m += 2) {
        const double dm = static_cast<double>(m);
        value = (dm - 1.0) / dm * value - c * s_pow / dm;
        s_pow *= s * s;
    }
    return value;
}

CapGeometry cap_geometry(double ri, double rj, double dist) {
    if (classify_regime(ri, rj, dist) != Regime::PartialOverlap)
        throw domain_error("cap_geometry: balls are not in partial overlap");
    // Offset of the intersection plane from center i, and the chord half-length
    // in Heron form; both stay accurate when the cap is thin.
    const double x = (ri * ri + dist * dist - rj * rj) / (2.0 * dist);
    const double chord =
        std::sqrt((ri + rj - dist) * (dist - ri + rj) * (dist + ri - rj) * (dist + ri + rj)) / (2.0 * dist);
    CapGeometry cap;
    cap.theta = std::atan2(chord, x);
    cap.height = (ri + rj - dist) * (dist - ri + rj) / (2.0 * dist);
    return cap;
}

double cap_volume(std::size_t n, double r, double theta) {
    if (n == 0) throw domain_error("cap_volume: dimension must be at least 1");
    if (r < 0.0) throw domain_error("cap_volume: negative radius");
    if (r == 0.0) return 0.0;
    const double dn = static_cast<double>(n);
    const double scale = std::pow(std::numbers::pi, (dn - 1.0) / 2.0) / gamma((dn + 1.0) / 2.0);
    return scale * std::pow(r, dn) * sin_power_integral(static_cast<unsigned>(n), theta);
}

namespace {

void check_pair(const Ball& b1, const Ball& b2, double dist) {
    if (b1.dimension() != b2.dimension())
        throw data_error("overlap of balls with different dimensions");
    if (b1.dimension() == 0) throw domain_error("overlap of zero-dimensional balls");
    if (b1.radius < 0.0 || b2.radius < 0.0) throw domain_error("overlap of a ball with negative radius");
    if (dist < 0.0) throw domain_error("negative center distance");
}

OverlapReport fixed_case(OverlapMethod method, Regime regime) {
    OverlapReport rep;
    rep.method = method;
    rep.regime = regime;
    rep.raw_rate = rep.rate = (regime == Regime::Containment) ? 1.0 : 0.0;
    return rep;
}

} // namespace

OverlapReport vbm_rate(const Ball& b1, const Ball& b2, double dist) {
    check_pair(b1, b2, dist);
    const std::size_t n = b1.dimension();
    const Regime regime = classify_regime(b1.radius, b2.radius, dist);
    OverlapReport rep = fixed_case(OverlapMethod::Vbm, regime);
    if (regime == Regime::Containment) {
        rep.lens_volume = std::min(ball_volume(n, b1.radius), ball_volume(n, b2.radius));
        return rep;
    }
    if (regime == Regime::Disjoint) return rep;

    const CapGeometry c1 = cap_geometry(b1.radius, b2.radius, dist);
    const CapGeometry c2 = cap_geometry(b2.radius, b1.radius, dist);
    rep.cap_height_1 = c1.height;
    rep.cap_height_2 = c2.height;
    rep.cap_volume_1 = cap_volume(n, b1.radius, c1.theta);
    rep.cap_volume_2 = cap_volume(n, b2.radius, c2.theta);
    rep.lens_volume = rep.cap_volume_1 + rep.cap_volume_2;

    // The rate is evaluated with radii normalised by the larger one and the
    // gamma ratio in log space, so it stays finite in high dimension.
    const double dn = static_cast<double>(n);
    const double r_max = std::max(b1.radius, b2.radius);
    const double w1 = std::pow(b1.radius / r_max, dn);
    const double w2 = std::pow(b2.radius / r_max, dn);
    const double cap_over_ball =
        std::exp(std::lgamma(dn / 2.0 + 1.0) - std::lgamma((dn + 1.0) / 2.0)) / std::sqrt(std::numbers::pi);
    const unsigned un = static_cast<unsigned>(n);
    const double numer = w1 * sin_power_integral(un, c1.theta) + w2 * sin_power_integral(un, c2.theta);
    rep.raw_rate = cap_over_ball * numer / (w1 + w2);
    rep.rate = std::min(rep.raw_rate, 1.0);
    return rep;
}

OverlapReport dbm_rate(const Ball& b1, const Ball& b2, double dist) {
    check_pair(b1, b2, dist);
    const Regime regime = classify_regime(b1.radius, b2.radius, dist);
    OverlapReport rep = fixed_case(OverlapMethod::Dbm, regime);
    if (regime != Regime::PartialOverlap) return rep;

    rep.cap_height_1 = cap_geometry(b1.radius, b2.radius, dist).height;
    rep.cap_height_2 = cap_geometry(b2.radius, b1.radius, dist).height;
    rep.raw_rate = (rep.cap_height_1 + rep.cap_height_2) / dist;
    rep.rate = std::min(rep.raw_rate, 1.0);
    return rep;
}

OverlapReport obm_rate(const Dataset& ds, const Partition& p1, const Partition& p2, double dist,
                       const DistanceFn& fn, CostCounters& counters) {
    if (p1.members.empty() && p2.members.empty()) throw domain_error("obm_rate: both partitions are empty");
    if (p1.pivot.size() != p2.pivot.size()) throw data_error("overlap of balls with different dimensions");
    if (dist < 0.0) throw domain_error("negative center distance");

    const Regime regime = classify_regime(p1.radius, p2.radius, dist);
    OverlapReport rep = fixed_case(OverlapMethod::Obm, regime);
    if (regime != Regime::PartialOverlap) return rep;

    // Members of the two partitions are disjoint, so the union is a plain concatenation.
    std::size_t shared = 0;
    auto count_in_both = [&](const std::vector<ObjectId>& members) {
        for (ObjectId id : members) {
            auto o = ds.coords(id);
            const double d1 = fn(o, p1.pivot, counters);
            const double d2 = fn(o, p2.pivot, counters);
            if (counters.less_equal(d1, p1.radius) && counters.less_equal(d2, p2.radius)) ++shared;
        }
    };
    count_in_both(p1.members);
    count_in_both(p2.members);

    rep.shared_objects = shared;
    rep.raw_rate = static_cast<double>(shared) / static_cast<double>(p1.members.size() + p2.members.size());
    rep.rate = std::min(rep.raw_rate, 1.0);
    return rep;
}

} // namespace ballidx
