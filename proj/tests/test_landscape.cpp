#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "wtsp/landscape.hpp"

using namespace wtsp::landscape;

namespace {

bool is_oracle_peak(GridPos p) {
    for (const auto& pk : oracle::multi_peak_local_maxima())
        if (pk.i == p.i && pk.j == p.j) return true;
    return false;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("objective values") {
    CHECK(objective_single(0.0, 0.0) == 0.0);
    CHECK(objective_single(1.0, -1.0) == -2.0);
    CHECK(objective_single(0.3, 0.4) == doctest::Approx(-0.25));
    CHECK(objective_multi(0.0, 0.0) == doctest::Approx(0.0));
    for (int i = -20; i <= 20; i += 3)
        for (int j = -20; j <= 20; j += 7) {
            const GridPos p{i, j};
            CHECK(objective(Kind::multi_peak, p) == doctest::Approx(oracle::multi_peak_value(p.x1(), p.x2())));
            CHECK(objective(Kind::single_peak, p) == doctest::Approx(-(p.x1() * p.x1() + p.x2() * p.x2())));
        }
}

TEST_CASE("kind names") {
    CHECK(parse_kind("single") == Kind::single_peak);
    CHECK(parse_kind("multi") == Kind::multi_peak);
    CHECK(parse_kind(to_string(Kind::multi_peak)) == Kind::multi_peak);
    CHECK_THROWS(parse_kind("double"));
}

TEST_CASE("grid snapping") {
    CHECK(snap(0.0, 1.0) == GridPos{0, 20});
    CHECK(snap(0.51, -0.26) == GridPos{10, -5});
    CHECK_THROWS_AS(snap(1.2, 0.0), std::out_of_range);
    CHECK(on_grid(0.8, -0.5) == GridPos{16, -10});
    CHECK_FALSE(on_grid(0.81, 0.0).has_value());
    CHECK_FALSE(on_grid(1.05, 0.0).has_value());
}

TEST_CASE("moves and the domain edge") {
    CHECK(step({0, 0}, Direction::N) == GridPos{0, 1});
    CHECK(step({0, 0}, Direction::SW) == GridPos{-1, -1});
    CHECK(admissible_moves({0, 0}).size() == 8);
    CHECK(admissible_moves({20, 0}).size() == 5);
    CHECK(admissible_moves({20, 20}).size() == 3);
    const auto corner = admissible_moves({20, 20});
    CHECK(corner[0] == GridPos{20, 19});
    CHECK(corner[1] == GridPos{19, 20});
    CHECK(corner[2] == GridPos{19, 19});
}

TEST_CASE("hill climbing the single peak from the top edge") {
    const auto t = hc_walk(Kind::single_peak, {0, 20});
    CHECK(t.final().pos == GridPos{0, 0});
    CHECK(t.final().objective == 0.0);
    CHECK(t.steps() == 20);
    for (std::size_t k = 1; k < t.records.size(); ++k) CHECK(t.records[k].objective > t.records[k - 1].objective);
}

TEST_CASE("hill climbing ends at a grid local maximum from every start") {
    for (int i = -20; i <= 20; i += 4)
        for (int j = -20; j <= 20; j += 5) {
            const auto t = hc_walk(Kind::multi_peak, {i, j});
            CHECK(is_oracle_peak(t.final().pos));
            const auto s = hc_walk(Kind::single_peak, {i, j});
            CHECK(s.final().pos == GridPos{0, 0});
        }
}

TEST_CASE("hill climbing the multi peak gets trapped away from the origin") {
    const auto t = hc_walk(Kind::multi_peak, {16, -10});
    CHECK_FALSE(t.final().pos == GridPos{0, 0});
    CHECK(t.final().objective < -0.05);
}

TEST_CASE("annealing records") {
    const SaParams params{1.0, 0.99};
    const auto t = sa_walk(Kind::multi_peak, {16, -10}, params, 3, 400);
    REQUIRE(t.records.size() == 401);
    CHECK(t.records[0].temperature == 1.0);
    CHECK_FALSE(t.records[0].delta.has_value());
    for (std::size_t k = 1; k < t.records.size(); ++k) {
        const auto& r = t.records[k];
        const auto& prev = t.records[k - 1];
        CHECK(r.iteration == k);
        CHECK(*r.temperature == doctest::Approx(std::pow(0.99, static_cast<double>(k))));
        const double expected_p = *r.delta <= 0.0 ? 1.0 : std::exp(-*r.delta / *r.temperature);
        CHECK(*r.acceptance_prob == doctest::Approx(expected_p));
        if (r.accepted) {
            CHECK(std::max(std::abs(r.pos.i - prev.pos.i), std::abs(r.pos.j - prev.pos.j)) == 1);
            CHECK(r.objective == doctest::Approx(prev.objective - *r.delta));
        } else {
            CHECK(r.pos == prev.pos);
            CHECK(*r.delta > 0.0);
        }
        CHECK(r.pos.in_domain());
    }
}

TEST_CASE("annealing is reproducible per seed") {
    const auto a = sa_walk(Kind::multi_peak, {0, 20}, {}, 11, 300);
    const auto b = sa_walk(Kind::multi_peak, {0, 20}, {}, 11, 300);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].pos == b.records[k].pos);
    CHECK_THROWS(sa_walk(Kind::single_peak, {0, 0}, {0.0, 0.9}, 1));
    CHECK_THROWS(sa_walk(Kind::single_peak, {0, 0}, {1.0, 1.0}, 1));
    CHECK_THROWS(sa_walk(Kind::single_peak, {30, 0}, {}, 1));
}

TEST_CASE("annealing survives a frozen schedule") {
    const auto t = sa_walk(Kind::single_peak, {5, 5}, {1.0, 0.5}, 1, 2000);
    CHECK(t.final().pos == GridPos{0, 0});
}

TEST_CASE("walk csv") {
    std::ostringstream hc;
    hc_walk(Kind::single_peak, {0, 2}).write_csv(hc);
    const std::string s = hc.str();
    CHECK(s.rfind("iteration,x1,x2,objective,temperature,acceptance_prob\n", 0) == 0);
    CHECK(count_of(s, "\n") == 4);
    CHECK(s.find(",,\n") != std::string::npos);

    std::ostringstream sa;
    sa_walk(Kind::single_peak, {0, 2}, {}, 1, 5).write_csv(sa);
    CHECK(count_of(sa.str(), "\n") == 7);
    CHECK(sa.str().find(",,\n") == std::string::npos);
}

TEST_CASE("svg chart") {
    std::ostringstream out;
    write_svg_chart(out, "Cost", "objective", {{"hc", {-1.0, -0.5, 0.0}}, {"sa", {-1.0, -0.7, -0.2, 0.0}}});
    const std::string s = out.str();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(count_of(s, "<polyline") == 2);
    CHECK(s.find("Cost") != std::string::npos);
}
