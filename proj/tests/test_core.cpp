#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wtsp/core.hpp"

using namespace wtsp;

namespace {

WaypointSet planar(std::initializer_list<std::pair<double, double>> xy) {
    WaypointSet s{CoordKind::planar, {}};
    for (auto [x, y] : xy) s.points.push_back({s.points.size(), y, x});
    return s;
}

}  // namespace

TEST_CASE("single point gives a zero 1x1 matrix") {
    const auto d = build_distance_matrix(planar({{3.0, 4.0}}));
    REQUIRE(d.size() == 1);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("planar 3-4-5 distance is symmetric") {
    const auto d = build_distance_matrix(planar({{0, 0}, {3, 4}}));
    CHECK(d(0, 1) == 5.0);
    CHECK(d(1, 0) == 5.0);
    CHECK(d.metric() == MetricKind::euclidean);
}

TEST_CASE("quarter meridian on the equator") {
    WaypointSet s{CoordKind::geographic, {{0, 0.0, 0.0}, {1, 0.0, 90.0}}};
    const auto d = build_distance_matrix(s);
    const double expected = std::numbers::pi / 2.0 * 6'371'000.0;
    CHECK(d(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(d(0, 1) == doctest::Approx(10'007'543.0).epsilon(1e-7));
    CHECK(d(0, 1) == doctest::Approx(oracle::chord_arc_m(0, 0, 0, 90)).epsilon(1e-12));
}

TEST_CASE("haversine agrees with the chord formula on site-scale pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(6.86, 6.89), lon(-8.12, -8.08);
    for (int k = 0; k < 200; ++k) {
        const double a = lat(rng), b = lon(rng), c = lat(rng), e = lon(rng);
        CHECK(haversine_m(a, b, c, e) == doctest::Approx(oracle::chord_arc_m(a, b, c, e)).epsilon(1e-9));
    }
}

TEST_CASE("matrices are symmetric with zero diagonal") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = build_distance_matrix(oracle::random_planar(30, seed));
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(d(i, i) == 0.0);
            for (std::size_t j = 0; j < d.size(); ++j) {
                CHECK(d(i, j) == d(j, i));
                CHECK(d(i, j) >= 0.0);
            }
        }
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS(build_distance_matrix(WaypointSet{}));
    WaypointSet bad{CoordKind::geographic, {{0, 95.0, 0.0}, {1, 0.0, 0.0}}};
    CHECK_THROWS_AS(build_distance_matrix(bad), std::invalid_argument);
    WaypointSet gap{CoordKind::planar, {{0, 0.0, 0.0}, {2, 1.0, 1.0}}};
    CHECK_THROWS_AS(build_distance_matrix(gap), std::invalid_argument);
    CHECK_THROWS(DistanceMatrix::from_rows({{0.0, 1.0}, {2.0, 0.0}}));
    CHECK_THROWS(DistanceMatrix::from_rows({{0.0, -1.0}, {-1.0, 0.0}}));
    CHECK_THROWS(DistanceMatrix::from_rows({{1.0, 1.0}, {1.0, 0.0}}));
}

TEST_CASE("tour length of two cities doubles the edge") {
    const auto d = DistanceMatrix::from_rows({{0, 7}, {7, 0}});
    const std::vector<std::size_t> order{0, 1};
    CHECK(tour_length(order, d) == 14.0);
}

TEST_CASE("equilateral triangle has length 3 in any order") {
    const auto d = DistanceMatrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    std::vector<std::size_t> order{0, 1, 2};
    do {
        CHECK(tour_length(order, d) == 3.0);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("tour length matches an independent summation") {
    const auto d = build_distance_matrix(oracle::random_planar(8, 5));
    std::vector<std::size_t> order{3, 1, 7, 0, 5, 2, 6, 4};
    CHECK(tour_length(order, d) == oracle::tour_sum(order, d));
}

TEST_CASE("tour length is rotation and reversal invariant") {
    const auto d = build_distance_matrix(oracle::random_planar(12, 8));
    std::vector<std::size_t> order(12);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
    const double base = tour_length(order, d);
    for (std::size_t r = 0; r < order.size(); ++r) {
        std::vector<std::size_t> rot(order.begin() + r, order.end());
        rot.insert(rot.end(), order.begin(), order.begin() + r);
        CHECK(tour_length(rot, d) == doctest::Approx(base).epsilon(1e-12));
    }
    std::vector<std::size_t> rev(order.rbegin(), order.rend());
    CHECK(tour_length(rev, d) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("tour length rejects bad permutations") {
    const auto d = build_distance_matrix(oracle::random_planar(4, 1));
    CHECK_THROWS(tour_length(std::vector<std::size_t>{0, 1, 1, 2}, d));
    CHECK_THROWS(tour_length(std::vector<std::size_t>{0, 1, 2}, d));
    CHECK_THROWS(tour_length(std::vector<std::size_t>{0, 1, 2, 4}, d));
    CHECK_FALSE(is_permutation_of(std::vector<std::size_t>{0, 0, 1, 2}, 4));
    CHECK(is_permutation_of(std::vector<std::size_t>{3, 0, 1, 2}, 4));
}

TEST_CASE("gap to best") {
    CHECK(std::abs(gap_to_best(12951.0, 11096.2) - 16.72) <= 0.01);
    CHECK(std::abs(gap_to_best(18440.19, 18360.3) - 0.44) <= 0.01);
    CHECK(gap_to_best(5.0, 5.0) == 0.0);
    CHECK_THROWS(gap_to_best(1.0, 0.0));
    CHECK_THROWS(gap_to_best(1.0, -2.0));
}

TEST_CASE("rotated tour keeps its cycle") {
    const auto d = build_distance_matrix(oracle::random_planar(6, 2));
    const Tour t = Tour::from_order({4, 2, 0, 5, 1, 3}, d);
    const Tour r = t.rotated_to(0);
    CHECK(r.order == std::vector<std::size_t>{0, 5, 1, 3, 4, 2});
    CHECK(r.length_m == doctest::Approx(t.length_m).epsilon(1e-12));
}

TEST_CASE("trace monotonicity") {
    SolveTrace t;
    t.record(0, 10);
    t.record(1, 9);
    t.record(1, 9);
    CHECK(t.is_monotone());
    t.record(2, 9.5);
    CHECK_FALSE(t.is_monotone());
}

TEST_CASE("held-karp on the unit square") {
    const auto d = build_distance_matrix(planar({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    const Tour t = held_karp(d);
    CHECK(t.length_m == 4.0);
    CHECK(t.order == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("held-karp on three cities sums the pairwise distances") {
    const auto d = build_distance_matrix(planar({{0, 0}, {3, 0}, {0, 4}}));
    CHECK(held_karp(d).length_m == 12.0);
}

TEST_CASE("held-karp matches exhaustive enumeration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 4 + seed % 5;
        const auto d = build_distance_matrix(oracle::random_planar(n, 1000 + seed));
        const auto exact = held_karp(d);
        const auto brute = oracle::brute_force_tsp(d);
        CHECK(exact.length_m == brute.length);
        CHECK(exact.order == brute.order);
    }
}

TEST_CASE("held-karp argmin is invariant under scaling") {
    const auto d = build_distance_matrix(oracle::random_planar(9, 77));
    const auto a = held_karp(d);
    const auto b = held_karp(d.scaled(3.5));
    CHECK(a.order == b.order);
    CHECK(b.length_m == doctest::Approx(3.5 * a.length_m).epsilon(1e-12));
}

TEST_CASE("held-karp size limits") {
    CHECK_THROWS(held_karp(build_distance_matrix(oracle::random_planar(1, 1))));
    CHECK_THROWS(held_karp(build_distance_matrix(oracle::random_planar(kHeldKarpMaxN + 1, 1))));
    const auto two = held_karp(build_distance_matrix(planar({{0, 0}, {0, 2}})));
    CHECK(two.length_m == 4.0);
}
