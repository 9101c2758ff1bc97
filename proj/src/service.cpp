#include "wtsp/service.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "wtsp/core.hpp"
#include "wtsp/data.hpp"
#include "wtsp/solvers.hpp"

namespace wtsp::service {
namespace {

using nlohmann::json;

/// Request validation failure mapped to 400.
struct BadRequest : std::runtime_error {
    BadRequest(std::string f, const std::string& what) : std::runtime_error(what), field(std::move(f)) {}
    std::string field;
};

Response error(int status, const std::string& message, const std::string& field = {}) {
    json j{{"error", message}};
    if (!field.empty()) j["field"] = field;
    return {status, j.dump()};
}

json parse_body(std::string_view body) {
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw BadRequest("body", "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw BadRequest("body", std::string("malformed JSON: ") + e.what());
    }
}

double number_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw BadRequest(where + "." + key, "missing");
    const json& v = obj[key];
    if (!v.is_number()) throw BadRequest(where + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw BadRequest(where + "." + key, "must be finite");
    return d;
}

CoordKind parse_coordinates(const json& req, const json* sample) {
    if (req.contains("coordinates")) {
        const json& c = req["coordinates"];
        if (c == "geographic") return CoordKind::geographic;
        if (c == "planar") return CoordKind::planar;
        throw BadRequest("coordinates", "expected 'geographic' or 'planar'");
    }
    if (sample && sample->is_object() && sample->contains("x") && sample->contains("y")) return CoordKind::planar;
    return CoordKind::geographic;
}

struct ParsedPoints {
    WaypointSet set;
    std::vector<long long> ids;
};

ParsedPoints parse_points(const json& req) {
    if (!req.contains("points")) throw BadRequest("points", "missing");
    const json& pts = req["points"];
    if (!pts.is_array()) throw BadRequest("points", "expected an array");
    if (pts.size() < kMinPoints || pts.size() > kMaxPoints)
        throw BadRequest("points", "need between " + std::to_string(kMinPoints) + " and " +
                                       std::to_string(kMaxPoints) + " points, got " + std::to_string(pts.size()));
    ParsedPoints out;
    out.set.kind = parse_coordinates(req, &pts[0]);
    std::unordered_set<long long> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string where = "points[" + std::to_string(i) + "]";
        const json& p = pts[i];
        if (!p.is_object()) throw BadRequest(where, "expected an object");
        if (!p.contains("id") || !p["id"].is_number_integer()) throw BadRequest(where + ".id", "expected an integer");
        const long long id = p["id"].get<long long>();
        if (!seen.insert(id).second) throw BadRequest(where + ".id", "duplicate id " + std::to_string(id));
        Waypoint w;
        w.id = i;
        const bool xy = p.contains("x") || p.contains("y");
        if (out.set.kind == CoordKind::planar && xy) {
            w.lon = number_field(p, "x", where);
            w.lat = number_field(p, "y", where);
        } else {
            w.lat = number_field(p, "lat", where);
            w.lon = number_field(p, "lon", where);
        }
        if (out.set.kind == CoordKind::geographic) {
            if (w.lat < -90.0 || w.lat > 90.0) throw BadRequest(where + ".lat", "outside [-90, 90]");
            if (w.lon < -180.0 || w.lon > 180.0) throw BadRequest(where + ".lon", "outside [-180, 180]");
        }
        out.set.points.push_back(w);
        out.ids.push_back(id);
    }
    return out;
}

Budget request_budget(const json& req, const MethodInfo& method, std::size_t n) {
    if (req.contains("time_budget_ms") && !req["time_budget_ms"].is_null()) {
        const json& b = req["time_budget_ms"];
        if (!b.is_number()) throw BadRequest("time_budget_ms", "expected a number");
        const double ms = b.get<double>();
        if (!(ms > 0.0) || ms > kMaxBudgetMs)
            throw BadRequest("time_budget_ms", "must lie in (0, " + std::to_string(static_cast<int>(kMaxBudgetMs)) + "]");
        return Budget::millis(ms);
    }
    Budget b = default_budget(method, n);
    if (method.kind != MethodKind::construction && method.kind != MethodKind::exact) b.max_ms = kDefaultBudgetMs;
    return b;
}

}  // namespace

FifoGate::FifoGate(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

std::size_t FifoGate::active() const {
    std::lock_guard lock(mu_);
    return active_;
}

void FifoGate::acquire() {
    std::unique_lock lock(mu_);
    const std::uint64_t ticket = next_ticket_++;
    cv_.wait(lock, [&] { return ticket == serving_ && active_ < capacity_; });
    ++serving_;
    ++active_;
    cv_.notify_all();
}

void FifoGate::release() {
    {
        std::lock_guard lock(mu_);
        --active_;
    }
    cv_.notify_all();
}

FifoGate::Permit::Permit(FifoGate& gate) : gate_(gate) { gate_.acquire(); }
FifoGate::Permit::~Permit() { gate_.release(); }

Response handle_solve(std::string_view body, FifoGate* gate) {
    try {
        const json req = parse_body(body);
        if (!req.contains("method") || !req["method"].is_string()) throw BadRequest("method", "expected a string");
        const MethodInfo* method = find_method(req["method"].get<std::string>());
        if (!method) {
            return error(422, "unknown method '" + req["method"].get<std::string>() + "'; valid: " + method_list(),
                         "method");
        }
        const ParsedPoints points = parse_points(req);

        SolveRequest sr;
        sr.method = method->id;
        if (req.contains("seed")) {
            if (!req["seed"].is_number_unsigned()) throw BadRequest("seed", "expected a nonnegative integer");
            sr.seed = req["seed"].get<std::uint64_t>();
        }
        if (req.contains("params") && !req["params"].is_null()) {
            try {
                sr.params = resolve_params(*method, req["params"]);
            } catch (const InvalidParam& e) {
                throw BadRequest("params." + e.field(), e.what());
            }
        }
        bool include_trace = false;
        if (req.contains("include_trace")) {
            if (!req["include_trace"].is_boolean()) throw BadRequest("include_trace", "expected a boolean");
            include_trace = req["include_trace"].get<bool>();
        }
        sr.budget = request_budget(req, *method, points.set.size());

        const DistanceMatrix d = build_distance_matrix(points.set);
        std::optional<FifoGate::Permit> permit;
        if (gate && method->kind != MethodKind::construction) permit.emplace(*gate);
        const SolveOutcome out = solve(d, sr);
        permit.reset();

        if (!is_permutation_of(out.tour.order, points.set.size()))
            return error(500, "solver returned an invalid tour");
        json order = json::array();
        for (std::size_t idx : out.tour.order) order.push_back(points.ids[idx]);
        json resp{{"method", out.method},
                  {"order", order},
                  {"length_m", out.tour.length_m},
                  {"elapsed_ms", out.elapsed_ms}};
        if (!out.warnings.empty()) resp["warnings"] = out.warnings;
        if (include_trace) {
            json trace = json::array();
            for (const auto& s : out.trace.samples) trace.push_back({{"elapsed_ms", s.elapsed_ms}, {"best_cost_m", s.best_cost_m}});
            resp["trace"] = trace;
        }
        return {200, resp.dump()};
    } catch (const BadRequest& e) {
        return error(400, e.what(), e.field);
    } catch (const BudgetExhausted& e) {
        return error(408, e.what(), "time_budget_ms");
    } catch (const UnknownMethod& e) {
        return error(422, e.what(), "method");
    } catch (const std::invalid_argument& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response handle_methods() { return {200, method_catalog().dump()}; }

Response handle_grid(std::string_view body) {
    try {
        const json req = parse_body(body);
        const CoordKind kind = parse_coordinates(req, nullptr);
        if (!req.contains("bbox") || !req["bbox"].is_object()) throw BadRequest("bbox", "expected an object");
        const json& b = req["bbox"];
        BoundingBox box;
        box.kind = kind;
        if (kind == CoordKind::planar && b.contains("min_x")) {
            box.min_lon = number_field(b, "min_x", "bbox");
            box.max_lon = number_field(b, "max_x", "bbox");
            box.min_lat = number_field(b, "min_y", "bbox");
            box.max_lat = number_field(b, "max_y", "bbox");
        } else {
            box.min_lat = number_field(b, "min_lat", "bbox");
            box.max_lat = number_field(b, "max_lat", "bbox");
            box.min_lon = number_field(b, "min_lon", "bbox");
            box.max_lon = number_field(b, "max_lon", "bbox");
        }
        try {
            box.validate();
        } catch (const std::invalid_argument& e) {
            throw BadRequest("bbox", e.what());
        }
        auto dim = [&](const char* key) {
            if (!req.contains(key) || !req[key].is_number_unsigned() || req[key].get<std::uint64_t>() < 1)
                throw BadRequest(key, "expected a positive integer");
            return req[key].get<std::uint64_t>();
        };
        const std::uint64_t rows = dim("rows"), cols = dim("cols");
        if (rows > kMaxGridPoints || cols > kMaxGridPoints || rows * cols > kMaxGridPoints)
            throw BadRequest("rows", "rows * cols must not exceed " + std::to_string(kMaxGridPoints));
        const WaypointSet set = grid_points(box, rows, cols);
        json points = json::array();
        for (const auto& p : set.points) {
            if (kind == CoordKind::planar)
                points.push_back({{"id", p.id}, {"x", p.x()}, {"y", p.y()}});
            else
                points.push_back({{"id", p.id}, {"lat", p.lat}, {"lon", p.lon}});
        }
        return {200, json{{"coordinates", to_string(kind)}, {"points", points}}.dump()};
    } catch (const BadRequest& e) {
        return error(400, e.what(), e.field);
    } catch (const std::invalid_argument& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response handle_health() { return {200, "ok", "text/plain"}; }

std::string ServiceConfig::effective_origin() const {
    return cors_origin.value_or("http://localhost:" + std::to_string(port));
}

namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>waypoint-tsp</title></head>
<body><h1>waypoint-tsp planning service</h1>
<p>No UI bundle is installed. The JSON API is available at
<code>/api/methods</code>, <code>/api/solve</code> and <code>/api/grid</code>.</p></body></html>
)";

void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
}

}  // namespace

struct Server::Impl {
    ServiceConfig config;
    httplib::Server http;
    FifoGate gate;
    int port = 0;

    explicit Impl(ServiceConfig c)
        : config(std::move(c)),
          gate(config.max_concurrent_solves ? config.max_concurrent_solves
                                            : std::max(1u, std::thread::hardware_concurrency())) {}
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    auto& http = impl_->http;
    Impl* self = impl_.get();
    http.set_payload_max_length(16 * 1024 * 1024);
    http.set_post_routing_handler([self](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", self->config.effective_origin());
        res.set_header("Vary", "Origin");
    });
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
    http.Get("/api/methods", [](const httplib::Request&, httplib::Response& res) { send(res, handle_methods()); });
    http.Post("/api/solve",
              [self](const httplib::Request& req, httplib::Response& res) { send(res, handle_solve(req.body, &self->gate)); });
    http.Post("/api/grid", [](const httplib::Request& req, httplib::Response& res) { send(res, handle_grid(req.body)); });

    std::error_code ec;
    if (std::filesystem::is_directory(self->config.static_dir, ec) &&
        std::filesystem::exists(self->config.static_dir / "index.html", ec)) {
        http.set_mount_point("/", self->config.static_dir.string());
    } else {
        http.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& im = *impl_;
    if (im.config.port == 0) {
        im.port = im.http.bind_to_any_port(im.config.host);
        if (im.port <= 0) throw std::runtime_error("cannot bind " + im.config.host);
        if (!im.config.cors_origin) im.config.cors_origin = "http://localhost:" + std::to_string(im.port);
    } else {
        if (!im.http.bind_to_port(im.config.host, im.config.port))
            throw std::runtime_error("cannot bind " + im.config.host + ":" + std::to_string(im.config.port));
        im.port = im.config.port;
    }
    return im.port;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

int Server::port() const noexcept { return impl_->port; }

}  // namespace wtsp::service
