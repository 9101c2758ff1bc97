#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "temp_dir.hpp"
#include "wtsp/cli.hpp"
#include "wtsp/data.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = wtsp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("help exits cleanly") {
    const auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("solve") != std::string::npos);
    CHECK(cli({"solve", "--help"}).code == 0);
}

TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"solve", "--method", "nn"}).code == 2);
    CHECK(cli({"gen", "--n", "x", "--out", "a.csv"}).code == 2);
}

TEST_CASE("gen then solve") {
    TempDir tmp;
    const auto pts = (tmp / "pts.csv").string();
    auto g = cli({"gen", "--n", "12", "--seed", "5", "--out", pts});
    REQUIRE(g.code == 0);
    CHECK(wtsp::load_waypoints(pts).size() == 12);

    const auto route = (tmp / "route.json").string();
    const auto trace = (tmp / "trace.csv").string();
    auto s = cli({"solve", "--in", pts, "--method", "sa", "--seed", "3", "--iterations", "5000", "--out", route,
                  "--trace", trace});
    REQUIRE(s.code == 0);
    CHECK(s.out.rfind("method=sa points=12 length_m=", 0) == 0);
    const auto rf = wtsp::import_route(route);
    CHECK(rf.route.size() == 12);
    CHECK(s.out.find("length_m=" + [&] {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", rf.length_m);
        return std::string(buf);
    }()) != std::string::npos);
    CHECK(wtsp::read_file(trace).rfind("elapsed_ms,best_cost_m\n", 0) == 0);
}

TEST_CASE("solve rejects an unknown method with the valid list") {
    TempDir tmp;
    const auto pts = (tmp / "pts.csv").string();
    REQUIRE(cli({"gen", "--n", "5", "--out", pts}).code == 0);
    const auto r = cli({"solve", "--in", pts, "--method", "magic"});
    CHECK(r.code == 2);
    CHECK(r.err.find("christofides") != std::string::npos);
}

TEST_CASE("solve parameters") {
    TempDir tmp;
    const auto pts = (tmp / "pts.csv").string();
    REQUIRE(cli({"gen", "--n", "10", "--out", pts}).code == 0);
    CHECK(cli({"solve", "--in", pts, "--method", "sa", "--param", "alpha=0.95", "--iterations", "1000"}).code == 0);
    CHECK(cli({"solve", "--in", pts, "--method", "sa", "--param", "alpha=7", "--iterations", "1000"}).code != 0);
    CHECK(cli({"solve", "--in", pts, "--method", "sa", "--param", "alpha"}).code == 2);
}

TEST_CASE("seed comes from the environment when not given") {
    TempDir tmp;
    const auto pts = (tmp / "pts.csv").string();
    REQUIRE(cli({"gen", "--n", "14", "--out", pts}).code == 0);
    const std::vector<std::string> args{"solve", "--in", pts, "--method", "ql", "--iterations", "200"};
    ::setenv(wtsp::cli::kSeedEnv, "9", 1);
    const auto a = cli(args);
    ::unsetenv(wtsp::cli::kSeedEnv);
    auto explicit_args = args;
    explicit_args.insert(explicit_args.end(), {"--seed", "9"});
    const auto b = cli(explicit_args);
    auto length_of = [](const std::string& s) { return s.substr(s.find("length_m="), s.find(" elapsed") - s.find("length_m=")); };
    CHECK(length_of(a.out) == length_of(b.out));
}

TEST_CASE("grid command") {
    TempDir tmp;
    const auto out = (tmp / "grid.geojson").string();
    REQUIRE(cli({"grid", "--rows", "3", "--cols", "5", "--out", out}).code == 0);
    CHECK(wtsp::load_waypoints(out).size() == 15);
    const auto planar = (tmp / "grid.csv").string();
    REQUIRE(cli({"grid", "--rows", "2", "--cols", "2", "--planar-box", "0,0,100,100", "--out", planar}).code == 0);
    const auto g = wtsp::load_waypoints(planar);
    CHECK(g.kind == wtsp::CoordKind::planar);
    CHECK(g.points[0].x() == 25.0);
    CHECK(cli({"grid", "--rows", "2", "--cols", "2", "--bbox", "1,2,3", "--out", planar}).code == 2);
}

TEST_CASE("landscape command writes csv and charts") {
    TempDir tmp;
    const auto dir = tmp.path().string();
    auto r = cli({"landscape", "--kind", "single", "--method", "hc", "--start", "0,1", "--out", dir});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("after 20 iterations") != std::string::npos);
    CHECK(fs::exists(tmp / "landscape_single_hc.csv"));
    CHECK(fs::exists(tmp / "landscape_single_hc_cost.svg"));

    r = cli({"landscape", "--kind", "multi", "--method", "sa", "--start", "0.8,-0.5", "--seed", "1", "--out", dir});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(tmp / "landscape_multi_sa.csv"));
    CHECK(fs::exists(tmp / "landscape_multi_sa_temperature.svg"));
    CHECK(fs::exists(tmp / "landscape_multi_sa_probability.svg"));

    CHECK(cli({"landscape", "--start", "0.81,0", "--out", dir}).code == 2);
    CHECK(cli({"landscape", "--kind", "triple", "--out", dir}).code == 2);
}

TEST_CASE("bench run writes reports") {
    TempDir tmp;
    const auto dir = (tmp / "bench").string();
    const auto r = cli({"bench", "run", "--methods", "nn,christofides,sa", "--sizes", "8,12", "--repeats", "2",
                        "--iterations", "2000", "--out", dir});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("| Method | Tour Len. | Gap to best (%) | Time (s) |") != std::string::npos);
    CHECK(fs::exists(fs::path(dir) / "report.csv"));
    CHECK(fs::exists(fs::path(dir) / "report.json"));
    CHECK(fs::exists(fs::path(dir) / "report.md"));
    CHECK(fs::exists(fs::path(dir) / "runs.csv"));
    CHECK(cli({"bench", "run", "--methods", "nn,bogus", "--sizes", "8", "--out", dir}).code == 2);
}

TEST_CASE("missing input file") {
    CHECK(cli({"solve", "--in", "/nonexistent/file.csv", "--method", "nn"}).code == 2);
}
