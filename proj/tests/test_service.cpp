#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "oracles.hpp"
#include "wtsp/service.hpp"

using namespace wtsp::service;
using nlohmann::json;

namespace {

json planar_points(std::size_t n, std::uint64_t seed, long long id_offset = 100) {
    const auto set = oracle::random_planar(n, seed);
    json pts = json::array();
    for (const auto& p : set.points)
        pts.push_back({{"id", static_cast<long long>(p.id) + id_offset}, {"x", p.x()}, {"y", p.y()}});
    return pts;
}

json geo_points() {
    return json::array({{{"id", 1}, {"lat", 6.870}, {"lon", -8.100}},
                        {{"id", 2}, {"lat", 6.880}, {"lon", -8.095}},
                        {{"id", 3}, {"lat", 6.875}, {"lon", -8.110}},
                        {{"id", 4}, {"lat", 6.868}, {"lon", -8.090}}});
}

json body_of(const Response& r) { return json::parse(r.body); }

std::string field_of(const Response& r) { return body_of(r).value("field", ""); }

}  // namespace

TEST_CASE("health and methods") {
    const auto h = handle_health();
    CHECK(h.status == 200);
    CHECK(h.body == "ok");
    const auto m = handle_methods();
    CHECK(m.status == 200);
    const auto j = body_of(m);
    REQUIRE(j.is_array());
    bool has_sa = false;
    for (const auto& e : j) has_sa = has_sa || e["id"] == "sa";
    CHECK(has_sa);
}

TEST_CASE("solve returns the caller's ids in visit order") {
    const json req{{"method", "nn"}, {"points", geo_points()}};
    const auto r = handle_solve(req.dump());
    REQUIRE(r.status == 200);
    const auto j = body_of(r);
    CHECK(j["method"] == "nn");
    CHECK(j["order"].size() == 4);
    CHECK(j["order"][0] == 1);
    std::vector<long long> ids = j["order"].get<std::vector<long long>>();
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<long long>{1, 2, 3, 4});
    CHECK(j["length_m"].get<double>() > 0.0);
    CHECK(j.contains("elapsed_ms"));
}

TEST_CASE("planar points are inferred from x and y") {
    const json req{{"method", "held_karp"}, {"points", planar_points(8, 3)}};
    const auto r = handle_solve(req.dump());
    REQUIRE(r.status == 200);
    const auto d = wtsp::build_distance_matrix(oracle::random_planar(8, 3));
    CHECK(body_of(r)["length_m"].get<double>() == doctest::Approx(wtsp::held_karp(d).length_m));
}

TEST_CASE("seeded solves are deterministic apart from timing") {
    // No time budget: iterative methods fall back to their default iteration
    // counts, which finish far inside the wall-clock cap at this size.
    for (const char* method : {"sa", "ql", "dql", "tabu"}) {
        const json req{{"method", method}, {"seed", 7}, {"points", planar_points(12, 4)}};
        auto a = body_of(handle_solve(req.dump()));
        auto b = body_of(handle_solve(req.dump()));
        a.erase("elapsed_ms");
        b.erase("elapsed_ms");
        CHECK_MESSAGE(a == b, method);
    }
}

TEST_CASE("trace is returned on request") {
    const json req{{"method", "hc"}, {"points", planar_points(15, 2)}, {"include_trace", true}};
    const auto j = body_of(handle_solve(req.dump()));
    REQUIRE(j.contains("trace"));
    CHECK(j["trace"].size() >= 1);
    CHECK(j["trace"].back()["best_cost_m"].get<double>() == doctest::Approx(j["length_m"].get<double>()));
}

TEST_CASE("bad requests map to 400 with the offending field") {
    CHECK(handle_solve("{not json").status == 400);
    CHECK(handle_solve("[]").status == 400);
    CHECK(field_of(handle_solve(json{{"points", geo_points()}}.dump())) == "method");

    json one{{"method", "nn"}, {"points", json::array({{{"id", 1}, {"lat", 0}, {"lon", 0}}})}};
    auto r = handle_solve(one.dump());
    CHECK(r.status == 400);
    CHECK(field_of(r) == "points");

    json dup{{"method", "nn"}, {"points", geo_points()}};
    dup["points"][2]["id"] = 1;
    r = handle_solve(dup.dump());
    CHECK(r.status == 400);
    CHECK(field_of(r) == "points[2].id");

    json lat{{"method", "nn"}, {"points", geo_points()}};
    lat["points"][1]["lat"] = 91;
    CHECK(field_of(handle_solve(lat.dump())) == "points[1].lat");

    json budget{{"method", "sa"}, {"points", geo_points()}, {"time_budget_ms", 0}};
    CHECK(field_of(handle_solve(budget.dump())) == "time_budget_ms");
    budget["time_budget_ms"] = 60001;
    CHECK(handle_solve(budget.dump()).status == 400);

    json param{{"method", "sa"}, {"points", geo_points()}, {"params", {{"alpha", 3}}}};
    r = handle_solve(param.dump());
    CHECK(r.status == 400);
    CHECK(field_of(r) == "params.alpha");

    json big{{"method", "nn"}, {"points", planar_points(kMaxPoints + 1, 1)}};
    CHECK(handle_solve(big.dump()).status == 400);

    json hk{{"method", "held_karp"}, {"points", planar_points(19, 1)}};
    CHECK(handle_solve(hk.dump()).status == 400);
}

TEST_CASE("unknown method is 422 and lists the valid ids") {
    const auto r = handle_solve(json{{"method", "quantum"}, {"points", geo_points()}}.dump());
    CHECK(r.status == 422);
    CHECK(body_of(r)["error"].get<std::string>().find("christofides") != std::string::npos);
}

TEST_CASE("grid endpoint") {
    json req{{"bbox", {{"min_lat", 6.86}, {"max_lat", 6.89}, {"min_lon", -8.12}, {"max_lon", -8.08}}},
             {"rows", 3},
             {"cols", 4}};
    auto r = handle_grid(req.dump());
    REQUIRE(r.status == 200);
    auto j = body_of(r);
    CHECK(j["points"].size() == 12);
    CHECK(j["points"][0]["lat"].get<double>() == doctest::Approx(6.865));
    CHECK(j["points"][0]["lon"].get<double>() == doctest::Approx(-8.115));

    json planar{{"coordinates", "planar"}, {"bbox", {{"min_x", 0}, {"max_x", 100}, {"min_y", 0}, {"max_y", 50}}},
                {"rows", 1}, {"cols", 2}};
    j = body_of(handle_grid(planar.dump()));
    CHECK(j["points"][1]["x"] == 75.0);
    CHECK(j["points"][1]["y"] == 25.0);

    req["rows"] = 100;
    req["cols"] = 21;
    CHECK(handle_grid(req.dump()).status == 400);
    req["rows"] = 0;
    CHECK(field_of(handle_grid(req.dump())) == "rows");
    req["rows"] = 2;
    req["bbox"]["min_lat"] = 7.0;
    CHECK(field_of(handle_grid(req.dump())) == "bbox");
}

TEST_CASE("fifo gate admits in arrival order and caps concurrency") {
    FifoGate gate(1);
    std::atomic<int> inside{0}, peak{0};
    std::vector<int> order;
    std::mutex mu;
    std::vector<std::thread> threads;
    for (int k = 0; k < 4; ++k) {
        threads.emplace_back([&, k] {
            FifoGate::Permit p(gate);
            const int now = ++inside;
            peak = std::max(peak.load(), now);
            {
                std::lock_guard lock(mu);
                order.push_back(k);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
            --inside;
        });
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    for (auto& t : threads) t.join();
    CHECK(peak == 1);
    CHECK(order.size() == 4);
    CHECK(gate.active() == 0);
}

TEST_CASE("http server on an ephemeral port") {
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.static_dir = "does-not-exist";
    Server server(cfg);
    const int port = server.bind();
    REQUIRE(port > 0);
    std::thread t([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(2);
    httplib::Result health;
    for (int attempt = 0; attempt < 100 && !health; ++attempt) {
        health = client.Get("/healthz");
        if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "http://localhost:" + std::to_string(port));

    auto methods = client.Get("/api/methods");
    REQUIRE(methods);
    CHECK(methods->status == 200);

    const json req{{"method", "christofides"}, {"points", geo_points()}};
    auto solved = client.Post("/api/solve", req.dump(), "application/json");
    REQUIRE(solved);
    CHECK(solved->status == 200);
    CHECK(json::parse(solved->body)["order"].size() == 4);

    auto unknown = client.Post("/api/solve", json{{"method", "x"}, {"points", geo_points()}}.dump(), "application/json");
    REQUIRE(unknown);
    CHECK(unknown->status == 422);

    auto pre = client.Options("/api/solve");
    REQUIRE(pre);
    CHECK(pre->status == 204);
    CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

    auto root = client.Get("/");
    REQUIRE(root);
    CHECK(root->status == 200);
    CHECK(root->body.find("/api/solve") != std::string::npos);

    server.stop();
    t.join();
}
