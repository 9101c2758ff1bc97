#include "wtsp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtsp/bench.hpp"
#include "wtsp/data.hpp"
#include "wtsp/landscape.hpp"
#include "wtsp/service.hpp"
#include "wtsp/solvers.hpp"

namespace wtsp::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw UsageError("bad number in " + what + ": '" + s + "'");
    return v;
}

std::vector<double> doubles(const std::string& s, std::size_t count, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() != count)
        throw UsageError(what + " needs " + std::to_string(count) + " comma-separated numbers");
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_double(p, what));
    return out;
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        std::uint64_t v = 0;
        const std::string s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw UsageError(std::string(kSeedEnv) + " must be a nonnegative integer, got '" + s + "'");
        return v;
    }
    return 0;
}

const MethodInfo& method_or_usage(const std::string& name) {
    if (const MethodInfo* m = find_method(name)) return *m;
    throw UsageError("unknown method '" + name + "'\nvalid methods: " + method_list());
}

json parse_params(const std::vector<std::string>& items, const MethodInfo& method) {
    json params = json::object();
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), raw = item.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        params[key] = value;
    }
    try {
        return resolve_params(method, params);
    } catch (const InvalidParam& e) {
        throw UsageError(std::string("invalid --param ") + e.what());
    }
}

Budget make_budget(const std::optional<double>& ms, const std::optional<std::uint64_t>& iterations) {
    Budget b{iterations, ms};
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return b;
}

BoundingBox parse_bbox(const std::string& geo, const std::string& planar) {
    if (!geo.empty() && !planar.empty()) throw UsageError("--bbox and --planar-box are mutually exclusive");
    try {
        if (!planar.empty()) {
            const auto v = doubles(planar, 4, "--planar-box");
            return BoundingBox::planar(v[0], v[1], v[2], v[3]);
        }
        if (!geo.empty()) {
            const auto v = doubles(geo, 4, "--bbox");
            BoundingBox b{CoordKind::geographic, v[0], v[1], v[2], v[3]};
            b.validate();
            return b;
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return BoundingBox::default_site();
}

// --- verbs -----------------------------------------------------------------

struct SolveArgs {
    std::string in;
    std::string method;
    std::optional<std::uint64_t> seed;
    std::optional<double> budget_ms;
    std::optional<std::uint64_t> iterations;
    std::vector<std::string> params;
    std::size_t start = 0;
    std::string out;
    std::string trace;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const MethodInfo& method = method_or_usage(a.method);
    SolveRequest req;
    req.method = method.id;
    req.params = parse_params(a.params, method);
    req.seed = resolve_seed(a.seed);
    req.budget = make_budget(a.budget_ms, a.iterations);
    req.start = a.start;

    const WaypointSet points = load_waypoints(a.in);
    if (points.size() < 2) throw std::runtime_error("need at least 2 waypoints, found " + std::to_string(points.size()));
    if (a.start >= points.size()) throw UsageError("--start exceeds the number of waypoints");
    const DistanceMatrix d = build_distance_matrix(points);
    const SolveOutcome result = solve(d, req);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    if (!a.out.empty()) export_route(result.tour, points, a.out);
    if (!a.trace.empty()) write_file_atomic(a.trace, bench::trace_to_csv(result.trace));
    out << "method=" << result.method << " points=" << points.size() << " length_m=" << fmt(result.tour.length_m, 3)
        << " elapsed_ms=" << fmt(result.elapsed_ms, 3) << '\n';
    return kExitOk;
}

struct BenchArgs {
    std::string methods;
    std::string sizes;
    std::size_t repeats = 10;
    std::optional<std::uint64_t> seed;
    std::optional<double> budget_ms;
    std::optional<std::uint64_t> iterations;
    std::string out = "bench_out";
    std::size_t parallel = 1;
    std::string geo_bbox;
    std::string planar_box;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    bench::SuiteConfig config;
    for (const auto& m : split(a.methods, ',')) config.methods.push_back(method_or_usage(m).id);
    for (const auto& s : split(a.sizes, ',')) {
        const double v = to_double(s, "--sizes");
        if (v < 2 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw UsageError("--sizes entries must be integers >= 2");
        config.sizes.push_back(static_cast<std::size_t>(v));
    }
    if (config.methods.empty() || config.sizes.empty()) throw UsageError("--methods and --sizes must not be empty");
    if (a.repeats < 1) throw UsageError("--repeats must be >= 1");
    if (a.parallel < 1) throw UsageError("--parallel must be >= 1");
    config.repeats = a.repeats;
    config.seed = resolve_seed(a.seed);
    config.budget = make_budget(a.budget_ms, a.iterations);
    config.parallelism = a.parallel;
    config.out_dir = fs::path(a.out);
    const BoundingBox box = parse_bbox(a.geo_bbox, a.planar_box);

    const auto report = bench::run_suite(config, bench::synthetic_datasets(config.seed, box));
    for (const auto& r : report.runs)
        if (r.error) err << "run failed: " << r.result.method << " n=" << r.result.size << ": " << *r.error << '\n';
    for (const auto& p : bench::emit_report(report, config.out_dir.value())) err << "wrote " << p.string() << '\n';
    out << bench::report_to_markdown(report);
    return kExitOk;
}

struct LandscapeArgs {
    std::string kind = "single";
    std::string method = "hc";
    std::string start = "0,1";
    std::optional<std::uint64_t> seed;
    std::uint64_t max_iters = landscape::kDefaultMaxIters;
    double t0 = 1.0;
    double alpha = 0.99;
    std::string out = ".";
};

int cmd_landscape(const LandscapeArgs& a, std::ostream& out, std::ostream& err) {
    landscape::Kind kind;
    try {
        kind = landscape::parse_kind(a.kind);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.method != "hc" && a.method != "sa") throw UsageError("--method must be hc or sa");
    const auto xy = doubles(a.start, 2, "--start");
    const auto start = landscape::on_grid(xy[0], xy[1]);
    if (!start || !start->in_domain())
        throw UsageError("--start must lie on the 0.05 grid inside [-1, 1]^2, got " + a.start);
    landscape::SaParams params{a.t0, a.alpha};
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const auto trace = a.method == "hc" ? landscape::hc_walk(kind, *start, a.max_iters)
                                        : landscape::sa_walk(kind, *start, params, resolve_seed(a.seed), a.max_iters);
    const std::string stem = "landscape_" + landscape::to_string(kind) + "_" + a.method;
    const fs::path dir(a.out);

    std::ostringstream csv;
    trace.write_csv(csv);
    write_file_atomic(dir / (stem + ".csv"), csv.str());

    landscape::Series cost{"objective", {}}, temperature{"temperature", {}}, prob{"acceptance probability", {}};
    for (const auto& r : trace.records) {
        cost.values.push_back(r.objective);
        temperature.values.push_back(r.temperature.value_or(std::nan("")));
        prob.values.push_back(r.acceptance_prob.value_or(std::nan("")));
    }
    std::vector<fs::path> written{dir / (stem + ".csv")};
    auto chart = [&](const std::string& name, const std::string& title, const std::string& label,
                     const landscape::Series& s) {
        std::ostringstream svg;
        landscape::write_svg_chart(svg, title, label, {s});
        written.push_back(dir / (stem + "_" + name + ".svg"));
        write_file_atomic(written.back(), svg.str());
    };
    const std::string title = a.method == "hc" ? "Hill climbing" : "Simulated annealing";
    chart("cost", title + ", " + landscape::to_string(kind) + " peak", "objective", cost);
    if (a.method == "sa") {
        chart("temperature", title + " temperature", "temperature", temperature);
        chart("probability", title + " acceptance probability", "probability", prob);
    }
    for (const auto& p : written) err << "wrote " << p.string() << '\n';
    const auto& last = trace.final();
    out << "final objective " << fmt(last.objective, 6) << " at (" << fmt(last.pos.x1(), 2) << ", "
        << fmt(last.pos.x2(), 2) << ") after " << (trace.records.size() - 1) << " iterations\n";
    return kExitOk;
}

struct GenArgs {
    std::size_t n = 20;
    std::optional<std::uint64_t> seed;
    std::string geo_bbox;
    std::string planar_box;
    std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream&) {
    if (a.n < 1) throw UsageError("--n must be >= 1");
    const BoundingBox box = parse_bbox(a.geo_bbox, a.planar_box);
    const auto points = generate_dataset(a.n, box, resolve_seed(a.seed));
    if (box.kind == CoordKind::planar && format_for(a.out) == WaypointFormat::geojson)
        throw UsageError("planar points can only be written as CSV");
    save_waypoints(points, a.out);
    out << "wrote " << points.size() << " points to " << a.out << '\n';
    return kExitOk;
}

struct GridArgs {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string geo_bbox;
    std::string planar_box;
    std::string out;
};

int cmd_grid(const GridArgs& a, std::ostream& out, std::ostream&) {
    if (a.rows < 1 || a.cols < 1) throw UsageError("--rows and --cols must be >= 1");
    const BoundingBox box = parse_bbox(a.geo_bbox, a.planar_box);
    const auto points = grid_points(box, a.rows, a.cols);
    if (box.kind == CoordKind::planar && format_for(a.out) == WaypointFormat::geojson)
        throw UsageError("planar points can only be written as CSV");
    save_waypoints(points, a.out);
    out << "wrote " << points.size() << " points to " << a.out << '\n';
    return kExitOk;
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = service::kDefaultPort;
    std::string cors_origin;
    std::string static_dir = "web";
    std::size_t max_solves = 0;
};

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream&) {
    if (a.port < 0 || a.port > 65535) throw UsageError("--port must lie in [0, 65535]");
    service::ServiceConfig config;
    config.host = a.host;
    config.port = a.port;
    if (!a.cors_origin.empty()) config.cors_origin = a.cors_origin;
    config.static_dir = a.static_dir;
    config.max_concurrent_solves = a.max_solves;
    service::Server server(config);
    const int port = server.bind();
    out << "listening on http://" << a.host << ':' << port << std::endl;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const bool ok = server.listen();
    g_server = nullptr;
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Waypoint ordering for sampling routes: construction heuristics, local search, "
                 "Q-learning and benchmarks."};
    app.name("wtsp");
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "order the waypoints of a file with one method");
    solve_cmd->add_option("--in", solve_args.in, "waypoint file (.csv or .geojson)")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--method", solve_args.method, "method id or alias: " + method_list())->required();
    solve_cmd->add_option("--seed", solve_args.seed, std::string("random seed (default $") + kSeedEnv + " or 0)");
    solve_cmd->add_option("--budget-ms", solve_args.budget_ms, "wall-clock budget for iterative methods");
    solve_cmd->add_option("--iterations", solve_args.iterations, "iteration budget for iterative methods");
    solve_cmd->add_option("--param", solve_args.params, "method parameter key=value (repeatable)");
    solve_cmd->add_option("--start", solve_args.start, "index of the first waypoint of the route");
    solve_cmd->add_option("--out", solve_args.out, "route JSON output");
    solve_cmd->add_option("--trace", solve_args.trace, "cost-over-time CSV output");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "benchmark suites");
    bench_cmd->require_subcommand(1);
    auto* bench_run = bench_cmd->add_subcommand("run", "run every method on every size");
    bench_run->add_option("--methods", bench_args.methods, "comma-separated method ids")->required();
    bench_run->add_option("--sizes", bench_args.sizes, "comma-separated dataset sizes")->required();
    bench_run->add_option("--repeats", bench_args.repeats, "runs per stochastic method")->capture_default_str();
    bench_run->add_option("--seed", bench_args.seed, "base seed for datasets and runs");
    bench_run->add_option("--budget-ms", bench_args.budget_ms, "per-run wall-clock budget");
    bench_run->add_option("--iterations", bench_args.iterations, "per-run iteration budget");
    bench_run->add_option("--out", bench_args.out, "output directory")->capture_default_str();
    bench_run->add_option("--parallel", bench_args.parallel, "concurrent runs")->capture_default_str();
    bench_run->add_option("--bbox", bench_args.geo_bbox, "MIN_LAT,MAX_LAT,MIN_LON,MAX_LON of the synthetic site");
    bench_run->add_option("--planar-box", bench_args.planar_box, "MIN_X,MIN_Y,MAX_X,MAX_Y in meters");

    LandscapeArgs land_args;
    auto* land_cmd = app.add_subcommand("landscape", "grid walks on the single- and multi-peak surfaces");
    land_cmd->add_option("--kind", land_args.kind, "single or multi")->capture_default_str();
    land_cmd->add_option("--method", land_args.method, "hc or sa")->capture_default_str();
    land_cmd->add_option("--start", land_args.start, "X1,X2 on the 0.05 grid")->capture_default_str();
    land_cmd->add_option("--seed", land_args.seed, "random seed for sa");
    land_cmd->add_option("--max-iters", land_args.max_iters, "iteration cap")->capture_default_str();
    land_cmd->add_option("--T0", land_args.t0, "initial temperature for sa")->capture_default_str();
    land_cmd->add_option("--alpha", land_args.alpha, "cooling factor for sa")->capture_default_str();
    land_cmd->add_option("--out", land_args.out, "output directory")->capture_default_str();

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "generate a seeded synthetic waypoint set");
    gen_cmd->add_option("--n", gen_args.n, "number of points")->required();
    gen_cmd->add_option("--seed", gen_args.seed, "random seed");
    gen_cmd->add_option("--bbox", gen_args.geo_bbox, "MIN_LAT,MAX_LAT,MIN_LON,MAX_LON (default: 11 km^2 site)");
    gen_cmd->add_option("--planar-box", gen_args.planar_box, "MIN_X,MIN_Y,MAX_X,MAX_Y in meters");
    gen_cmd->add_option("--out", gen_args.out, "output file (.csv or .geojson)")->required();

    GridArgs grid_args;
    auto* grid_cmd = app.add_subcommand("grid", "waypoints at the cell centers of a grid");
    grid_cmd->add_option("--rows", grid_args.rows, "rows")->required();
    grid_cmd->add_option("--cols", grid_args.cols, "columns")->required();
    grid_cmd->add_option("--bbox", grid_args.geo_bbox, "MIN_LAT,MAX_LAT,MIN_LON,MAX_LON (default: 11 km^2 site)");
    grid_cmd->add_option("--planar-box", grid_args.planar_box, "MIN_X,MIN_Y,MAX_X,MAX_Y in meters");
    grid_cmd->add_option("--out", grid_args.out, "output file (.csv or .geojson)")->required();

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP planning service");
    serve_cmd->add_option("--host", serve_args.host, "bind address")->capture_default_str();
    serve_cmd->add_option("--port", serve_args.port, "TCP port")->capture_default_str();
    serve_cmd->add_option("--cors-origin", serve_args.cors_origin, "allowed origin (default http://localhost:PORT)");
    serve_cmd->add_option("--static", serve_args.static_dir, "directory served at /")->capture_default_str();
    serve_cmd->add_option("--max-solves", serve_args.max_solves, "concurrent heavy solves (0: one per core)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(solve_args, out, err);
        if (bench_run->parsed()) return cmd_bench(bench_args, out, err);
        if (land_cmd->parsed()) return cmd_landscape(land_args, out, err);
        if (gen_cmd->parsed()) return cmd_gen(gen_args, out, err);
        if (grid_cmd->parsed()) return cmd_grid(grid_args, out, err);
        if (serve_cmd->parsed()) return cmd_serve(serve_args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace wtsp::cli
