#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ballidx/geometry.hpp"
#include "ballidx/oracles.hpp"

using namespace ballidx;
using doctest::Approx;
using std::numbers::pi;

namespace {

Ball ball(Point c, double r) { return Ball{std::move(c), r}; }

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace

TEST_CASE("regime cascade") {
    CHECK(classify_regime(1, 1, 2) == Regime::Disjoint);  // tangent: disjoint wins
    CHECK(classify_regime(1, 1, 3) == Regime::Disjoint);
    CHECK(classify_regime(2, 1, 1) == Regime::Containment);  // internally tangent
    CHECK(classify_regime(2, 1, 0.5) == Regime::Containment);
    CHECK(classify_regime(1, 1, 0) == Regime::Containment);
    CHECK(classify_regime(1, 1, 1) == Regime::PartialOverlap);
    CHECK(classify_regime(0, 0, 0) == Regime::Containment);
    CHECK(classify_regime(0, 0, 1) == Regime::Disjoint);
    CHECK(classify_regime(0, 1, 0.5) == Regime::Containment);
}

TEST_CASE("gamma") {
    CHECK(ballidx::gamma(1.0) == Approx(1.0));
    CHECK(ballidx::gamma(0.5) == Approx(std::sqrt(pi)).epsilon(1e-12));
    CHECK(ballidx::gamma(5.0) == Approx(24.0));
    CHECK_THROWS_AS(ballidx::gamma(0.0), Error);
    CHECK_THROWS_AS(ballidx::gamma(-2.5), Error);
}

TEST_CASE("ball volume") {
    CHECK(ball_volume(2, 1.0) == Approx(pi).epsilon(1e-14));
    CHECK(ball_volume(3, 2.0) == Approx(4.0 / 3.0 * pi * 8.0).epsilon(1e-14));
    CHECK(ball_volume(5, 1.0) == Approx(8.0 * pi * pi / 15.0).epsilon(1e-14));
    CHECK(ball_volume(4, 0.0) == 0.0);
    CHECK_THROWS_AS(ball_volume(0, 1.0), Error);
    CHECK_THROWS_AS(ball_volume(2, -1.0), Error);

    const auto est = oracle::mc_ball_volume(5, 1.0, {10'000'000, 99});
    CHECK(std::abs(ball_volume(5, 1.0) - est.value) <= 3.0 * est.stderr_);

    for (std::size_t n = 1; n <= 30; ++n)
        CHECK(rel(ball_volume(n, 1.7), oracle::recurrence_ball_volume(n, 1.7)) < 1e-12);
}

TEST_CASE("sin power integral") {
    CHECK(sin_power_integral(1, pi / 2) == Approx(1.0).epsilon(1e-15));
    CHECK(sin_power_integral(2, pi) == Approx(pi / 2).epsilon(1e-15));
    CHECK(sin_power_integral(0, 0.7) == Approx(0.7));
    CHECK(std::abs(sin_power_integral(4, 1.0) - oracle::quad_sin_power(4, 1.0)) < 1e-12);
    for (unsigned n = 0; n <= 25; ++n) {
        CHECK(sin_power_integral(n, 0.0) == 0.0);
        for (double phi : {0.1, 1.3, 2.9, pi})
            CHECK(std::abs(sin_power_integral(n, phi) - oracle::quad_sin_power(n, phi)) < 1e-11);
    }
    CHECK_THROWS_AS(sin_power_integral(3, -0.1), Error);
    CHECK_THROWS_AS(sin_power_integral(3, 3.2), Error);
}

TEST_CASE("cap geometry") {
    const auto sym = cap_geometry(1, 1, 1);
    CHECK(sym.theta == Approx(pi / 3).epsilon(1e-14));
    CHECK(sym.height == Approx(0.5).epsilon(1e-14));

    CHECK(cap_geometry(1, 1, 2.0 - 1e-9).height < 1e-8);

    const auto lop = cap_geometry(2, 1, 2);
    CHECK(lop.theta == Approx(std::acos(7.0 / 8.0)).epsilon(1e-14));
    CHECK(lop.height == Approx(0.25).epsilon(1e-14));
    // the cap plane sits at x1 = (d^2 + r1^2 - r2^2) / (2d) from the first center
    CHECK(2.0 - lop.height == Approx((4.0 + 4.0 - 1.0) / 4.0));

    CHECK_THROWS_AS(cap_geometry(1, 1, 2), Error);
    CHECK_THROWS_AS(cap_geometry(2, 1, 0.5), Error);
}

TEST_CASE("cap volume") {
    for (std::size_t n = 1; n <= 12; ++n)
        CHECK(cap_volume(n, 1.3, pi / 2) == Approx(ball_volume(n, 1.3) / 2).epsilon(1e-12));
    CHECK(cap_volume(3, 1.0, pi / 3) == Approx(pi * 0.25 * 2.5 / 3.0).epsilon(1e-13));
    const double t = pi / 3;
    CHECK(cap_volume(2, 1.0, t) == Approx(t - std::sin(t) * std::cos(t)).epsilon(1e-13));
    CHECK(cap_volume(4, 2.0, pi) == Approx(ball_volume(4, 2.0)).epsilon(1e-12));
}

TEST_CASE("vbm rate") {
    CHECK(vbm_rate(ball({0, 0}, 1), ball({3, 0}, 1), 3).rate == 0.0);
    CHECK(vbm_rate(ball({0, 0}, 1), ball({2, 0}, 1), 2).rate == 0.0);

    const auto inside = vbm_rate(ball({0, 0, 0}, 3), ball({0.5, 0, 0}, 1), 0.5);
    CHECK(inside.rate == 1.0);
    CHECK(inside.regime == Regime::Containment);
    CHECK(inside.lens_volume == Approx(ball_volume(3, 1.0)));

    const auto lens = vbm_rate(ball({0, 0}, 1), ball({1, 0}, 1), 1);
    const double want = 2 * pi / 3 - std::sqrt(3.0) / 2;
    CHECK(lens.lens_volume == Approx(want).epsilon(1e-13));
    CHECK(lens.rate == Approx(want / (2 * pi)).epsilon(1e-13));
    CHECK(lens.rate == Approx(0.19550).epsilon(1e-4));
    CHECK(lens.regime == Regime::PartialOverlap);
}

TEST_CASE("dbm rate") {
    CHECK(dbm_rate(ball({0, 0}, 1), ball({2, 0}, 1), 2).rate == 0.0);

    const auto sym = dbm_rate(ball({0, 0}, 1), ball({1, 0}, 1), 1);
    CHECK(sym.cap_height_1 == Approx(0.5));
    CHECK(sym.cap_height_2 == Approx(0.5));
    CHECK(sym.raw_rate == Approx(1.0));

    const auto lop = dbm_rate(ball({0, 0}, 2), ball({2.5, 0}, 1), 2.5);
    CHECK(lop.cap_height_1 + lop.cap_height_2 == Approx(0.5).epsilon(1e-14));
    CHECK(lop.rate == Approx(0.2).epsilon(1e-14));

    // Deep partial overlap pushes the raw rate above 1; the rate is clamped.
    const auto deep = dbm_rate(ball({0, 0}, 1), ball({0.2, 0}, 1), 0.2);
    CHECK(deep.raw_rate > 1.0);
    CHECK(deep.rate == 1.0);
}

TEST_CASE("obm rate") {
    // 1-D balls [-5, 5] and [3, 13]; exactly 4 members fall in [3, 5].
    const Dataset ds = Dataset(1, {3, 4, -5, -4, -3, -2, -1, 0, 1, 2, 4.5, 5, 6, 7, 8, 9, 10, 11, 12, 13});
    Partition p1{1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0.0}, 5.0};
    Partition p2{2, {10, 11, 12, 13, 14, 15, 16, 17, 18, 19}, {8.0}, 5.0};
    const auto fn = DistanceFn::euclidean();
    CostCounters c;
    const auto rep = obm_rate(ds, p1, p2, 8.0, fn, c);
    CHECK(rep.shared_objects == 4);
    CHECK(rep.rate == Approx(0.2));
    CHECK(c.distance_count == 40);

    CostCounters c2;
    CHECK(obm_rate(ds, p1, p2, 10.0, fn, c2).rate == 0.0);  // disjoint, regardless of counts
    CHECK(obm_rate(ds, p1, p2, 0.0, fn, c2).rate == 1.0);   // containment, although |A| < 20
    CHECK(c2.distance_count == 0);

    const Partition empty1{1, {}, {0.0}, 1.0}, empty2{2, {}, {1.0}, 1.0};
    CHECK_THROWS_AS(obm_rate(ds, empty1, empty2, 1.0, fn, c), Error);
}

TEST_CASE("rates are symmetric under argument swap") {
    const auto fn = DistanceFn::euclidean();
    for (std::size_t n : {2, 3, 5, 9}) {
        for (const auto& p : oracle::random_ball_pairs(n, 50, Regime::PartialOverlap, 100 + n)) {
            CHECK(std::abs(vbm_rate(p.first, p.second, p.dist).rate - vbm_rate(p.second, p.first, p.dist).rate) <
                  1e-12);
            CHECK(std::abs(dbm_rate(p.first, p.second, p.dist).raw_rate -
                           dbm_rate(p.second, p.first, p.dist).raw_rate) < 1e-12);
            const Dataset ds = Dataset::from_rows({p.first.center, p.second.center});
            const Partition a{1, {0}, p.first.center, p.first.radius}, b{2, {1}, p.second.center, p.second.radius};
            CostCounters c;
            CHECK(obm_rate(ds, a, b, p.dist, fn, c).rate == obm_rate(ds, b, a, p.dist, fn, c).rate);
        }
    }
}

TEST_CASE("cap-sum identity on random partial pairs") {
    for (std::size_t n : {2, 4, 7}) {
        for (const auto& p : oracle::random_ball_pairs(n, 300, Regime::PartialOverlap, 7 * n)) {
            const double h1 = cap_geometry(p.first, p.second, p.dist).height;
            const double h2 = cap_geometry(p.second, p.first, p.dist).height;
            const double want = p.first.radius + p.second.radius - p.dist;
            REQUIRE(std::abs(h1 + h2 - want) <= 1e-9 * want);
        }
    }
}

TEST_CASE("lens volume matches closed forms in 2-D and 3-D") {
    for (std::size_t n : {2, 3}) {
        for (const auto& p : oracle::random_ball_pairs(n, 100, Regime::PartialOverlap, 31 + n)) {
            const double got = vbm_rate(p.first, p.second, p.dist).lens_volume;
            REQUIRE(rel(got, oracle::closed_form_lens_2d_3d(p.first, p.second, p.dist)) < 1e-9);
        }
    }
}

TEST_CASE("lens volume matches Monte Carlo in 2, 3 and 5 dimensions") {
    for (std::size_t n : {2, 3, 5}) {
        std::uint64_t seed = 500;
        for (const auto& p : oracle::random_ball_pairs(n, 3, Regime::PartialOverlap, 11 * n, 0.05, 0.5)) {
            const auto est = oracle::mc_lens_volume(p.first, p.second, {1'000'000, ++seed});
            CHECK(rel(vbm_rate(p.first, p.second, p.dist).lens_volume, est.value) < 0.02);
        }
    }
}

TEST_CASE("lens volume limits") {
    for (std::size_t n : {2, 3, 6}) {
        const Ball a = ball(Point(n, 0.0), 2.0);
        const Ball b = ball(Point(n, 0.0), 1.0);
        const double v_small = ball_volume(n, 1.0);
        CHECK(vbm_rate(a, b, 3.0 - 1e-8).lens_volume < 1e-6 * v_small);
        CHECK(rel(vbm_rate(a, b, 1.0 + 1e-8).lens_volume, v_small) < 1e-6);
    }
}

TEST_CASE("scale covariance") {
    for (std::size_t n : {2, 3, 5, 8}) {
        for (const auto& p : oracle::random_ball_pairs(n, 30, Regime::PartialOverlap, 3 * n)) {
            for (double s : {0.01, 3.0, 250.0}) {
                const Ball a = ball(p.first.center, s * p.first.radius);
                const Ball b = ball(p.second.center, s * p.second.radius);
                const auto base = vbm_rate(p.first, p.second, p.dist);
                const auto scaled = vbm_rate(a, b, s * p.dist);
                CHECK(rel(scaled.lens_volume, std::pow(s, static_cast<double>(n)) * base.lens_volume) < 1e-9);
                CHECK(std::abs(scaled.rate - base.rate) < 1e-9);
                CHECK(std::abs(dbm_rate(a, b, s * p.dist).rate - dbm_rate(p.first, p.second, p.dist).rate) < 1e-9);
            }
        }
    }
}

TEST_CASE("zero-radius balls use the same cascade") {
    const Ball p = ball({1, 1}, 0.0);
    CHECK(vbm_rate(p, p, 0.0).rate == 1.0);
    CHECK(dbm_rate(p, p, 0.0).rate == 1.0);
    CHECK(vbm_rate(p, ball({1, 1.5}, 1.0), 0.5).rate == 1.0);
    CHECK(vbm_rate(p, ball({1, 3}, 1.0), 2.0).rate == 0.0);
}

TEST_CASE("high-dimensional rates stay finite") {
    for (std::size_t n : {50, 200, 1000}) {
        const auto rep = vbm_rate(ball(Point(n, 0.0), 40.0), ball(Point(n, 0.0), 30.0), 20.0);
        CHECK(std::isfinite(rep.rate));
        CHECK(rep.rate >= 0.0);
        CHECK(rep.rate <= 0.5);
    }
}

TEST_CASE("pair validation") {
    CHECK_THROWS_AS(vbm_rate(ball({0, 0}, 1), ball({0, 0, 0}, 1), 1), Error);
    CHECK_THROWS_AS(dbm_rate(ball({0, 0}, 1), ball({1, 0}, 1), -1), Error);
    CHECK_THROWS_AS(vbm_rate(ball({0, 0}, -1), ball({1, 0}, 1), 1), Error);
    CHECK(parse_overlap_method("obm") == OverlapMethod::Obm);
    CHECK_THROWS_AS(parse_overlap_method("xyz"), Error);
}
