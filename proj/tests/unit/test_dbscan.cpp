#include <doctest.h>

#include <algorithm>
#include <random>

#include "ballidx/dbscan.hpp"
#include "ballidx/oracles.hpp"
#include "fixtures.hpp"

using namespace ballidx;

namespace {

const DistanceFn kEuclid = DistanceFn::euclidean();

std::vector<ObjectId> neighborhood(const Dataset& ds, ObjectId o, double eps) {
    CostCounters c;
    return epsilon_neighborhood(ds.object(o), ds, eps, kEuclid, c);
}

// Well-separated 2-D blobs with a little far-away noise, so that no border
// point is reachable from two clusters.
Dataset separated_blobs(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count(2, 5);
    std::vector<Point> centers;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) centers.push_back({40.0 * i, 25.0 * (i % 2)});
    std::vector<Point> rows;
    const Dataset core = fixtures::blobs(centers, 40, 1.0, seed);
    for (ObjectId id = 0; id < core.size(); ++id) rows.push_back(core.point(id));
    std::uniform_real_distribution<double> far(500.0, 900.0);
    for (int i = 0; i < 5; ++i) rows.push_back({far(rng), far(rng)});
    std::shuffle(rows.begin(), rows.end(), rng);
    return Dataset::from_rows(rows);
}

void check_cover(const std::vector<Partition>& parts, const Dataset& ds) {
    std::vector<int> seen(ds.size(), 0);
    CostCounters c;
    for (const auto& p : parts) {
        for (ObjectId id : p.members) {
            ++seen[id];
            REQUIRE(kEuclid(p.pivot, ds.coords(id), c) <= p.radius + 1e-9);
        }
    }
    for (int s : seen) REQUIRE(s == 1);
}

} // namespace

TEST_CASE("epsilon neighborhood") {
    const Dataset ds = fixtures::line({0, 1, 2, 10});
    CHECK(neighborhood(ds, 1, 0.5) == std::vector<ObjectId>{1});
    CHECK(neighborhood(ds, 1, 1.0) == std::vector<ObjectId>{0, 1, 2});
    CHECK(neighborhood(ds, 3, 10.0) == std::vector<ObjectId>{0, 1, 2, 3});

    CostCounters c;
    epsilon_neighborhood(ds.object(0), ds, 1.0, kEuclid, c);
    CHECK(c.distance_count == ds.size());
    CHECK(c.comparison_count == ds.size());
}

TEST_CASE("two distant blobs form two clusters") {
    const Dataset ds = fixtures::blobs({{0, 0}, {100, 100}}, 50, 1.0, 3);
    CostCounters c;
    const auto res = run_dbscan(ds, {5.0, 5}, kEuclid, c);
    CHECK(res.partitions.size() == 2);
    CHECK(res.noise_ids.empty());
    CHECK(oracle::label_partition(res.labels) == oracle::label_partition(oracle::reference_dbscan(ds, 5.0, 5)));
    CHECK(res.partitions[0].id == 1);
    CHECK(res.partitions[1].id == 2);
}

TEST_CASE("min_pts above the dataset size leaves everything noise") {
    const Dataset ds = fixtures::uniform(20, 2, 5);
    CostCounters c;
    const auto res = run_dbscan(ds, {10.0, 21}, kEuclid, c);
    CHECK(res.partitions.empty());
    CHECK(res.noise_ids.size() == 20);
    CHECK(std::all_of(res.labels.begin(), res.labels.end(), [](int l) { return l == kNoise; }));
}

TEST_CASE("density chain on a 1-D grid") {
    std::vector<double> xs;
    for (int i = 0; i < 30; ++i) xs.push_back(i);
    CostCounters c;
    const auto res = run_dbscan(fixtures::line(xs), {1.5, 2}, kEuclid, c);
    REQUIRE(res.partitions.size() == 1);
    CHECK(res.partitions[0].members.size() == 30);
    CHECK(res.partitions[0].pivot[0] == doctest::Approx(14.5));
    CHECK(res.partitions[0].radius == doctest::Approx(14.5));
}

TEST_CASE("parameters are validated") {
    const Dataset ds = fixtures::uniform(5, 2, 1);
    CostCounters c;
    CHECK_THROWS_AS(run_dbscan(ds, {0.0, 3}, kEuclid, c), Error);
    CHECK_THROWS_AS(run_dbscan(ds, {-1.0, 3}, kEuclid, c), Error);
    CHECK_THROWS_AS(run_dbscan(ds, {1.0, 0}, kEuclid, c), Error);
}

TEST_CASE("labels match the reference implementation") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset ds = separated_blobs(seed);
        CostCounters c;
        const auto res = run_dbscan(ds, {2.0, 4}, kEuclid, c);
        const auto want = oracle::reference_dbscan(ds, 2.0, 4);
        REQUIRE(oracle::label_partition(res.labels) == oracle::label_partition(want));
        std::vector<ObjectId> noise;
        for (ObjectId i = 0; i < want.size(); ++i)
            if (want[i] == 0) noise.push_back(i);
        REQUIRE(res.noise_ids == noise);
    }
}

TEST_CASE("absorb noise") {
    const auto fn = kEuclid;
    const Dataset ds = fixtures::line({0, 1, 2, 10, 11, 12, 5, 30});
    CostCounters c;
    std::vector<Partition> parts{make_partition(1, {0, 1, 2}, ds, fn, c), make_partition(2, {3, 4, 5}, ds, fn, c)};

    SUBCASE("no noise leaves partitions unchanged") {
        const auto out = absorb_noise(parts, {}, ds, fn, c);
        REQUIRE(out.size() == 2);
        CHECK(out[0].members == parts[0].members);
        CHECK(out[1].radius == parts[1].radius);
    }
    SUBCASE("nearest pivot wins and radii are refit") {
        const auto out = absorb_noise(parts, {6, 7}, ds, fn, c);
        CHECK(out[0].members == std::vector<ObjectId>{0, 1, 2, 6});
        CHECK(out[1].members == std::vector<ObjectId>{3, 4, 5, 7});
        check_cover(out, ds);
    }
    SUBCASE("single partition takes the point") {
        const auto out = absorb_noise({parts[0]}, {7}, ds, fn, c);
        CHECK(out[0].members == std::vector<ObjectId>{0, 1, 2, 7});
        CHECK(out[0].pivot[0] == doctest::Approx(8.25));
        CHECK(out[0].radius == doctest::Approx(21.75));
    }
    SUBCASE("no partitions gives one fallback partition") {
        const Dataset five = fixtures::line({0, 2, 4, 6, 8});
        const auto out = absorb_noise({}, {0, 1, 2, 3, 4}, five, fn, c);
        REQUIRE(out.size() == 1);
        CHECK(out[0].pivot == Point{4.0});
        CHECK(out[0].radius == doctest::Approx(4.0));
    }
}

TEST_CASE("clustering then absorption covers every object") {
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const Dataset ds = separated_blobs(seed);
        CostCounters c;
        const auto res = run_dbscan(ds, {2.0, 4}, kEuclid, c);
        check_cover(absorb_noise(res.partitions, res.noise_ids, ds, kEuclid, c), ds);
    }
}
