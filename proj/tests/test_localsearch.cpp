#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "wtsp/construct.hpp"
#include "wtsp/localsearch.hpp"

using namespace wtsp;

namespace {

const NeighborhoodKind kAll[] = {NeighborhoodKind::adjacent_swap, NeighborhoodKind::two_opt,
                                 NeighborhoodKind::or_opt};

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    std::shuffle(v.begin(), v.end(), std::mt19937_64(seed));
    return v;
}

}  // namespace

TEST_CASE("neighbourhood names round-trip") {
    for (auto k : kAll) CHECK(parse_neighborhood(to_string(k)) == k);
    CHECK_THROWS(parse_neighborhood("three_opt"));
}

TEST_CASE("move delta equals the recomputed length difference") {
    for (std::size_t n = 4; n <= 9; ++n) {
        const auto d = build_distance_matrix(oracle::random_planar(n, 40 + n));
        const auto order = shuffled(n, n);
        const double base = oracle::tour_sum(order, d);
        for (auto kind : kAll) {
            const auto moves = enumerate_moves(kind, n);
            CHECK_FALSE(moves.empty());
            for (const auto& m : moves) {
                auto after = order;
                apply_move(after, m);
                REQUIRE(is_permutation_of(after, n));
                CHECK(move_delta(order, m, d) == doctest::Approx(oracle::tour_sum(after, d) - base).epsilon(1e-9).scale(base));
            }
        }
    }
}

TEST_CASE("two-opt neighbourhood size") {
    // Pairs 1 <= i < j <= n-1, less the whole-suffix reversal that leaves the cycle unchanged.
    for (std::size_t n = 4; n < 12; ++n)
        CHECK(enumerate_moves(NeighborhoodKind::two_opt, n).size() == (n - 1) * (n - 2) / 2 - 1);
    for (auto k : kAll) CHECK(enumerate_moves(k, 3).empty());
}

TEST_CASE("random moves are valid") {
    std::mt19937_64 rng(3);
    const auto d = build_distance_matrix(oracle::random_planar(10, 1));
    auto order = shuffled(10, 2);
    for (int k = 0; k < 300; ++k) {
        const auto m = random_move(kAll[k % 3], 10, rng);
        const double before = oracle::tour_sum(order, d);
        const double delta = move_delta(order, m, d);
        apply_move(order, m);
        REQUIRE(is_permutation_of(order, 10));
        CHECK(oracle::tour_sum(order, d) == doctest::Approx(before + delta).epsilon(1e-9));
    }
}

TEST_CASE("acceptance probability") {
    CHECK(acceptance_probability(-5.0, 1.0) == 1.0);
    CHECK(acceptance_probability(0.0, 1.0) == 1.0);
    CHECK(acceptance_probability(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(acceptance_probability(2.0, 4.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(acceptance_probability(1.0, 0.5) < acceptance_probability(1.0, 1.0));
    CHECK(acceptance_probability(1000.0, 1e-6) == 0.0);
}

TEST_CASE("geometric cooling") {
    const AnnealSchedule s{2.0, 0.9};
    CHECK(s.temperature(0) == 2.0);
    for (std::uint64_t k = 1; k < 50; ++k) CHECK(s.temperature(k) == doctest::Approx(2.0 * std::pow(0.9, k)));
    CHECK_THROWS(AnnealSchedule{0.0, 0.9}.validate());
    CHECK_THROWS(AnnealSchedule{1.0, 1.0}.validate());
    CHECK_THROWS(AnnealSchedule{1.0, 0.0}.validate());
    CHECK_NOTHROW(AnnealSchedule{}.validate());
}

TEST_CASE("hill climbing ends in a two-opt local optimum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = build_distance_matrix(oracle::random_planar(30, seed));
        const Tour start = Tour::from_order(shuffled(30, seed + 100), d);
        const auto r = hill_climb(start, d);
        CHECK(r.converged);
        CHECK(is_permutation_of(r.tour.order, 30));
        CHECK(r.tour.length_m <= start.length_m);
        CHECK(r.tour.length_m == doctest::Approx(oracle::tour_sum(r.tour.order, d)).epsilon(1e-12));
        CHECK_FALSE(oracle::has_improving_two_opt(r.tour.order, d, 1e-9));
        CHECK(r.trace.is_monotone());
    }
}

TEST_CASE("hill climbing on the other neighbourhoods") {
    const auto d = build_distance_matrix(oracle::random_planar(20, 4));
    const Tour start = Tour::from_order(shuffled(20, 4), d);
    for (auto k : kAll) {
        const auto r = hill_climb(start, d, k);
        CHECK(r.converged);
        CHECK(r.tour.length_m < start.length_m);
        for (const auto& m : enumerate_moves(k, 20))
            CHECK(move_delta(r.tour.order, m, d) >= -1e-9 * r.tour.length_m);
    }
}

TEST_CASE("hill climbing honours an iteration budget") {
    const auto d = build_distance_matrix(oracle::random_planar(40, 8));
    const Tour start = Tour::from_order(shuffled(40, 8), d);
    const auto r = hill_climb(start, d, NeighborhoodKind::two_opt, Budget::iterations(3));
    CHECK(r.iterations <= 3);
    CHECK_FALSE(r.converged);
}

TEST_CASE("annealing is reproducible and never worse than its seed") {
    const auto d = build_distance_matrix(oracle::random_planar(25, 12));
    const Tour start = nearest_neighbor(d);
    const AnnealOptions opt{};
    const auto a = simulated_annealing(start, d, opt, 7, Budget::iterations(20000));
    const auto b = simulated_annealing(start, d, opt, 7, Budget::iterations(20000));
    CHECK(a.tour == b.tour);
    CHECK(a.trace.samples.size() == b.trace.samples.size());
    CHECK(a.tour.length_m <= start.length_m);
    CHECK(a.iterations <= 20000);
    CHECK(a.trace.is_monotone());
    CHECK(is_permutation_of(a.tour.order, 25));
}

TEST_CASE("annealing rejects a bad schedule") {
    const auto d = build_distance_matrix(oracle::random_planar(8, 1));
    AnnealOptions opt;
    opt.schedule.alpha = 1.5;
    CHECK_THROWS(simulated_annealing(nearest_neighbor(d), d, opt, 1, Budget::iterations(10)));
}

TEST_CASE("annealing on small instances reaches the optimum") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = build_distance_matrix(oracle::random_planar(8, 300 + seed));
        const auto r = simulated_annealing(nearest_neighbor(d), d, {}, seed, Budget::iterations(20000));
        CHECK(r.tour.length_m == doctest::Approx(held_karp(d).length_m).epsilon(1e-9));
    }
}

TEST_CASE("tabu list expiry") {
    TabuList t(5);
    t.add(1, 2, 10);
    t.add(2, 1, 10);
    t.add(3, 4, 12);
    CHECK(t.is_tabu(1, 2, 9));
    CHECK_FALSE(t.is_tabu(1, 2, 10));
    CHECK(t.is_tabu(3, 4, 11));
    t.prune(10);
    CHECK(t.size() == 1);
    t.prune(12);
    CHECK(t.size() == 0);
}

TEST_CASE("default tenure") {
    CHECK(default_tenure(8) == 10);
    CHECK(default_tenure(40) == 10);
    CHECK(default_tenure(100) == 25);
}

TEST_CASE("tabu search improves on its seed deterministically") {
    const auto d = build_distance_matrix(oracle::random_planar(30, 2));
    const Tour start = Tour::from_order(shuffled(30, 9), d);
    const auto a = tabu_search(start, d, {}, 0, Budget::iterations(200));
    const auto b = tabu_search(start, d, {}, 99, Budget::iterations(200));
    CHECK(a.tour == b.tour);
    CHECK(a.tour.length_m < start.length_m);
    CHECK(a.iterations <= 200);
    CHECK(a.trace.is_monotone());
    CHECK(a.tour.length_m <= hill_climb(start, d).tour.length_m + 1e-9);
}

TEST_CASE("penalty table") {
    // Unit square plus a far point; the longest tour edges get penalised.
    const auto d = DistanceMatrix::from_rows({{0, 1, 5, 1}, {1, 0, 1, 5}, {5, 1, 0, 1}, {1, 5, 1, 0}});
    PenaltyTable p(4);
    const std::vector<std::size_t> order{0, 2, 1, 3};
    const auto hit = p.penalize_max_utility(order, d);
    CHECK(hit.size() == 2);
    CHECK(p(0, 2) == 1);
    CHECK(p(2, 0) == 1);
    CHECK(p(1, 3) == 1);
    CHECK(p(0, 1) == 0);
    CHECK(p.tour_penalty(order) == 2);
    // With penalties 1, utility of the long edges halves to 2.5; they still win.
    CHECK(p.penalize_max_utility(order, d).size() == 2);
    CHECK(p(0, 2) == 2);
}

TEST_CASE("guided local search is never worse than plain descent") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto d = build_distance_matrix(oracle::random_planar(35, 60 + seed));
        const Tour start = nearest_neighbor(d);
        const auto hc = hill_climb(start, d);
        const auto g = guided_local_search(start, d, {}, seed, Budget::iterations(300));
        CHECK(is_permutation_of(g.tour.order, 35));
        CHECK(g.tour.length_m == doctest::Approx(oracle::tour_sum(g.tour.order, d)).epsilon(1e-12));
        CHECK(g.tour.length_m <= hc.tour.length_m + 1e-9);
        CHECK(g.trace.is_monotone());
    }
}

TEST_CASE("wall-clock budgets stop the search") {
    const auto d = build_distance_matrix(oracle::random_planar(200, 5));
    const Tour start = nearest_neighbor(d);
    Stopwatch w;
    const auto r = simulated_annealing(start, d, {}, 1, Budget::millis(50));
    CHECK(w.elapsed_ms() < 1000);
    CHECK(r.tour.length_m <= start.length_m);
}
