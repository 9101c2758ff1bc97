#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "wtsp/bench.hpp"

using namespace wtsp;
using namespace wtsp::bench;

namespace {

// Deterministic stand-in for solve(): length depends only on method and seed.
SolveOutcome fake_solve(const DistanceMatrix& d, const SolveRequest& req) {
    SolveOutcome out;
    out.method = req.method;
    std::vector<std::size_t> order(d.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    out.tour.order = order;
    double base = req.method == "nn" ? 120.0 : req.method == "sa" ? 100.0 : 110.0;
    out.tour.length_m = base + static_cast<double>(req.seed % 5) * (req.method == "sa" ? 1.0 : 0.0);
    out.elapsed_ms = 2.0;
    out.trace.record(0.0, base + 10.0);
    out.trace.record(1.0, out.tour.length_m);
    return out;
}

SuiteConfig small_config() {
    SuiteConfig c;
    c.methods = {"nn", "sa", "greedy_edge"};
    c.sizes = {8, 12};
    c.repeats = 5;
    c.seed = 10;
    c.budget = Budget::iterations(2000);
    return c;
}

}  // namespace

TEST_CASE("population statistics match the two-pass oracle") {
    const std::vector<double> v{3.5, 1.0, 9.25, 4.0, 4.0, 7.5};
    const auto s = population_stats(v);
    const auto o = oracle::two_pass(v);
    CHECK(s.mean == doctest::Approx(o.mean).epsilon(1e-15));
    CHECK(s.var == doctest::Approx(o.var).epsilon(1e-15));
    CHECK(s.std == doctest::Approx(std::sqrt(o.var)).epsilon(1e-15));
    const std::vector<double> one{5.0};
    CHECK(population_stats(one).var == 0.0);
    CHECK(std::isnan(population_stats(std::vector<double>{}).mean));
}

TEST_CASE("statistics do not depend on input order") {
    std::vector<double> v;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1e4, 2e4);
    for (int k = 0; k < 50; ++k) v.push_back(u(rng));
    const auto a = population_stats(v);
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = population_stats(v);
    CHECK(a.mean == b.mean);
    CHECK(a.var == b.var);
}

TEST_CASE("suite aggregation with a stand-in solver") {
    const auto report = run_suite(small_config(), synthetic_datasets(1), fake_solve);
    // nn and greedy_edge once each, sa five times, for two sizes.
    CHECK(report.runs.size() == 2 * (1 + 5 + 1));
    REQUIRE(report.rows.size() == 6);
    CHECK(report.rows[0].method == "nn");
    CHECK(report.rows[1].method == "sa");
    CHECK(report.rows[2].method == "greedy_edge");
    CHECK(report.rows[0].size == 8);
    CHECK(report.rows[3].size == 12);

    const auto& sa = report.rows[1];
    CHECK(sa.runs == 5);
    // Seeds 10..14 give lengths 100 + {0,1,2,3,4}.
    const auto o = oracle::two_pass({100, 101, 102, 103, 104});
    CHECK(sa.mean_len_m == doctest::Approx(o.mean));
    CHECK(sa.var_len_m == doctest::Approx(o.var));
    CHECK(sa.min_len_m == 100.0);
    CHECK(sa.gap_pct == 0.0);
    CHECK(report.rows[0].gap_pct == doctest::Approx(100.0 * (120.0 - 102.0) / 102.0));
    CHECK(report.rows[2].gap_pct == doctest::Approx(100.0 * (110.0 - 102.0) / 102.0));
}

TEST_CASE("failed runs are counted but excluded") {
    auto flaky = [](const DistanceMatrix& d, const SolveRequest& req) {
        if (req.method == "sa" && req.seed == 11) throw std::runtime_error("boom");
        return fake_solve(d, req);
    };
    const auto report = run_suite(small_config(), synthetic_datasets(1), flaky);
    const auto& sa = report.rows[1];
    CHECK(sa.failures == 1);
    // runs counts attempts, failures included.
    CHECK(sa.runs == 5);
    CHECK(sa.mean_len_m == doctest::Approx((100 + 102 + 103 + 104) / 4.0));
    const auto errors = std::count_if(report.runs.begin(), report.runs.end(), [](const RunRecord& r) { return r.error.has_value(); });
    CHECK(errors == 2);
}

TEST_CASE("parallel and serial runs agree on lengths") {
    auto cfg = small_config();
    cfg.methods = {"nn", "sa", "tabu"};
    cfg.sizes = {10};
    cfg.repeats = 3;
    const auto serial = run_suite(cfg, synthetic_datasets(3));
    cfg.parallelism = 3;
    const auto parallel = run_suite(cfg, synthetic_datasets(3));
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t k = 0; k < serial.rows.size(); ++k) {
        CHECK(serial.rows[k].method == parallel.rows[k].method);
        CHECK(serial.rows[k].mean_len_m == parallel.rows[k].mean_len_m);
        CHECK(serial.rows[k].var_len_m == parallel.rows[k].var_len_m);
    }
}

TEST_CASE("config validation") {
    auto c = small_config();
    c.sizes = {};
    CHECK_THROWS(c.validate());
    c = small_config();
    c.repeats = 0;
    CHECK_THROWS(c.validate());
    c = small_config();
    c.methods = {"bogus"};
    CHECK_THROWS(run_suite(c, synthetic_datasets(1), fake_solve));
}

TEST_CASE("synthetic datasets are seeded by size") {
    const auto p = synthetic_datasets(42);
    CHECK(p(10).points == generate_dataset(10, BoundingBox::default_site(), 52).points);
    CHECK(p(10).points == p(10).points);
}

TEST_CASE("smoothing is a trailing mean") {
    SolveTrace t;
    const std::vector<double> costs{10, 8, 8, 7, 4, 4, 3};
    for (std::size_t k = 0; k < costs.size(); ++k) t.record(static_cast<double>(k), costs[k]);
    const auto s = smooth_trace(t, 3);
    const auto o = oracle::running_mean(costs, 3);
    REQUIRE(s.samples.size() == costs.size());
    for (std::size_t k = 0; k < costs.size(); ++k) {
        CHECK(s.samples[k].best_cost_m == doctest::Approx(o[k]));
        CHECK(s.samples[k].elapsed_ms == t.samples[k].elapsed_ms);
    }
    CHECK_THROWS(smooth_trace(t, 0));
}

TEST_CASE("report csv round trip") {
    const auto report = run_suite(small_config(), synthetic_datasets(1), fake_solve);
    const std::string csv = report_to_csv(report);
    CHECK(csv.rfind("method,size,runs,failures,", 0) == 0);
    const auto back = parse_report_csv(csv);
    CHECK(back.rows == report.rows);
    CHECK_THROWS(parse_report_csv("method,size\nnn,3\n"));
}

TEST_CASE("report json and markdown") {
    const auto report = run_suite(small_config(), synthetic_datasets(1), fake_solve);
    const auto j = nlohmann::json::parse(report_to_json(report));
    CHECK(j["rows"].size() == 6);
    const std::string md = report_to_markdown(report);
    CHECK(md.find("| Method | Tour Len. | Gap to best (%) | Time (s) |") != std::string::npos);
    CHECK(md.find("**sa**") != std::string::npos);
    CHECK(md.find("**nn**") == std::string::npos);
    CHECK(md.find("## n = 8") != std::string::npos);
    CHECK(md.find("## n = 12") != std::string::npos);
}

TEST_CASE("artifacts on disk") {
    TempDir tmp;
    auto cfg = small_config();
    cfg.out_dir = tmp.path();
    const auto report = run_suite(cfg, synthetic_datasets(1), fake_solve);
    CHECK(std::filesystem::exists(tmp / "runs.csv"));
    CHECK(std::filesystem::exists(tmp.path() / "traces" / "sa_n8_r0.csv"));
    CHECK(std::filesystem::exists(tmp.path() / "traces" / "nn_n12_r0.csv"));
    const auto paths = emit_report(report, tmp.path());
    CHECK(paths.size() == 3);
    for (const auto& p : paths) CHECK(std::filesystem::file_size(p) > 0);
    CHECK(parse_report_csv(read_file(tmp / "report.csv")).rows == report.rows);
    CHECK(trace_to_csv(*report.runs[0].result.trace).rfind("elapsed_ms,best_cost_m\n", 0) == 0);
}
