#include "wtsp/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "wtsp/construct.hpp"
#include "wtsp/localsearch.hpp"
#include "wtsp/rl.hpp"

namespace wtsp {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

ParamSpec number(std::string name, double def, std::optional<double> lo, std::optional<double> hi,
                 std::string description, bool lo_excl = false, bool hi_excl = false) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = ParamType::number;
    p.default_value = def;
    p.min = lo;
    p.max = hi;
    p.min_exclusive = lo_excl;
    p.max_exclusive = hi_excl;
    p.description = std::move(description);
    return p;
}

ParamSpec integer(std::string name, std::int64_t def, std::optional<double> lo, std::optional<double> hi,
                  std::string description) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = ParamType::integer;
    p.default_value = def;
    p.min = lo;
    p.max = hi;
    p.description = std::move(description);
    return p;
}

ParamSpec boolean(std::string name, bool def, std::string description) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = ParamType::boolean;
    p.default_value = def;
    p.description = std::move(description);
    return p;
}

ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string description) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = ParamType::choice;
    p.default_value = std::move(def);
    p.choices = std::move(choices);
    p.description = std::move(description);
    return p;
}

ParamSpec neighborhood_param() {
    return choice("neighborhood", "two_opt", {"two_opt", "adjacent_swap", "or_opt"}, "improvement move set");
}

std::vector<ParamSpec> rl_params() {
    return {number("alpha", 0.01, 0.0, 1.0, "learning rate"),
            number("gamma", 0.95, 0.0, 1.0, "discount factor"),
            number("epsilon", 0.99, 0.0, 1.0, "initial exploration rate"),
            number("epsilon_min", 0.01, 0.0, 1.0, "exploration floor"),
            number("epsilon_decay", 0.995, 0.0, 1.0, "multiplicative exploration decay", true, true),
            choice("decay", "per_step", {"per_step", "per_episode"}, "when epsilon decays"),
            integer("episodes", 0, 0.0, 10'000'000.0, "training episodes; 0 means 100 * n"),
            choice("reward", "negative_distance", {"negative_distance", "inverse_distance"}, "reward signal")};
}

std::vector<MethodInfo> build_registry() {
    using K = MethodKind;
    std::vector<MethodInfo> r;
    auto add = [&r](std::string id, K kind, bool stochastic, std::string description,
                    std::vector<std::string> aliases = {}, std::vector<ParamSpec> params = {}) {
        r.push_back({std::move(id), kind, stochastic, std::move(description), std::move(aliases), std::move(params)});
    };
    add("nn", K::construction, false, "nearest neighbour from the start city",
        {"PATH_CHEAPEST_ARC", "nearest_neighbor"});
    add("greedy_edge", K::construction, false, "cheapest feasible edge first", {"GLOBAL_CHEAPEST_ARC"});
    add("lca", K::construction, false, "path grown at either end by its cheapest arc", {"LOCAL_CHEAPEST_ARC"});
    add("insertion:nearest", K::construction, false, "nearest insertion");
    add("insertion:farthest", K::construction, false, "farthest insertion");
    add("insertion:cheapest", K::construction, false, "cheapest insertion", {"LOCAL_CHEAPEST_INSERTION"});
    add("insertion:nearest:parallel", K::construction, false, "nearest insertion, re-ranked every round");
    add("insertion:farthest:parallel", K::construction, false, "farthest insertion, re-ranked every round");
    add("insertion:cheapest:parallel", K::construction, false, "cheapest insertion, re-ranked every round",
        {"PARALLEL_CHEAPEST_INSERTION"});
    add("savings", K::construction, false, "Clarke-Wright savings with the start city as depot", {"SAVINGS"});
    add("double_tree", K::construction, false, "doubled minimum spanning tree, shortcut");
    add("christofides", K::construction, false, "spanning tree plus odd-vertex matching, shortcut",
        {"CHRISTOFIDES"},
        {choice("matching", "auto", {"auto", "exact"},
                "auto matches exactly up to 18 odd vertices and greedily beyond; exact refuses larger sets")});
    add("hc", K::metaheuristic, false, "best-improvement hill climbing", {"GREEDY_DESCENT", "hill_climbing"},
        {neighborhood_param()});
    add("sa", K::metaheuristic, true, "simulated annealing with geometric cooling",
        {"SIMULATED_ANNEALING"},
        {number("T0", 1.0, 0.0, std::nullopt, "initial temperature", true),
         number("alpha", 0.99, 0.0, 1.0, "cooling factor", true, true), neighborhood_param(),
         boolean("cost_scaled", true, "multiply T0 by the seed tour length")});
    add("tabu", K::metaheuristic, false, "two-opt tabu search with aspiration",
        {"TABU_SEARCH", "GENERIC_TABU_SEARCH"},
        {integer("tenure", 0, 0.0, 1'000'000.0, "iterations an edge stays tabu; 0 means max(10, n/4)"),
         boolean("aspiration", true, "allow tabu moves that beat the best tour")});
    add("gls", K::metaheuristic, false, "guided local search with edge penalties", {"GUIDED_LOCAL_SEARCH"},
        {number("lambda_factor", 0.1, 0.0, std::nullopt, "penalty weight relative to mean edge length", true)});
    add("ql", K::rl, true, "tabular Q-learning", {"q_learning"}, rl_params());
    add("dql", K::rl, true, "double Q-learning", {"double_q_learning"}, rl_params());
    add("held_karp", K::exact, false, "exact dynamic program, n <= 18", {"exact"});
    return r;
}

json check_param(const ParamSpec& spec, const json& value) {
    switch (spec.type) {
        case ParamType::boolean:
            if (!value.is_boolean()) throw InvalidParam(spec.name, "expected a boolean");
            return value;
        case ParamType::choice: {
            if (!value.is_string()) throw InvalidParam(spec.name, "expected a string");
            const auto s = value.get<std::string>();
            if (std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end()) {
                std::string all;
                for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
                throw InvalidParam(spec.name, "'" + s + "' is not one of " + all);
            }
            return value;
        }
        case ParamType::integer:
            if (!value.is_number_integer()) throw InvalidParam(spec.name, "expected an integer");
            break;
        case ParamType::number:
            if (!value.is_number()) throw InvalidParam(spec.name, "expected a number");
            break;
    }
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw InvalidParam(spec.name, "must be finite");
    if (spec.min && (v < *spec.min || (spec.min_exclusive && v == *spec.min)))
        throw InvalidParam(spec.name, std::string("must be ") + (spec.min_exclusive ? "> " : ">= ") +
                                          json(*spec.min).dump());
    if (spec.max && (v > *spec.max || (spec.max_exclusive && v == *spec.max)))
        throw InvalidParam(spec.name, std::string("must be ") + (spec.max_exclusive ? "< " : "<= ") +
                                          json(*spec.max).dump());
    return value;
}

RlConfig rl_config(const json& p, const Budget& budget) {
    RlConfig c;
    c.alpha = p["alpha"].get<double>();
    c.gamma = p["gamma"].get<double>();
    c.epsilon = p["epsilon"].get<double>();
    c.epsilon_min = p["epsilon_min"].get<double>();
    c.epsilon_decay = p["epsilon_decay"].get<double>();
    c.decay = p["decay"] == "per_episode" ? EpsilonDecay::per_episode : EpsilonDecay::per_step;
    c.reward = p["reward"] == "inverse_distance" ? RewardMode::inverse_distance : RewardMode::negative_distance;
    c.episodes = p["episodes"].get<std::size_t>();
    if (c.episodes == 0 && budget.max_iterations) c.episodes = static_cast<std::size_t>(*budget.max_iterations);
    c.time_budget_ms = budget.max_ms;
    return c;
}

InsertionStrategy insertion_strategy(const std::string& id) {
    InsertionStrategy s;
    if (id.find("nearest") != std::string::npos) s.selector = InsertionSelector::nearest;
    else if (id.find("farthest") != std::string::npos) s.selector = InsertionSelector::farthest;
    else s.selector = InsertionSelector::cheapest;
    s.scope = id.ends_with(":parallel") ? InsertionScope::parallel : InsertionScope::sequential;
    return s;
}

struct RawResult {
    Tour tour;
    SolveTrace trace;
    std::vector<std::string> warnings;
};

RawResult run_method(const MethodInfo& m, const DistanceMatrix& d, const SolveRequest& req, const json& p,
                     const Budget& budget) {
    const std::string& id = m.id;
    const std::size_t start = req.start;
    if (id == "nn") return {nearest_neighbor(d, start), {}, {}};
    if (id == "greedy_edge") return {greedy_edge(d), {}, {}};
    if (id == "lca") return {local_cheapest_arc(d, start), {}, {}};
    if (id.starts_with("insertion:")) return {insertion(d, insertion_strategy(id), start), {}, {}};
    if (id == "savings") return {savings(d, start), {}, {}};
    if (id == "double_tree") return {double_tree(d), {}, {}};
    if (id == "christofides") {
        ChristofidesOptions opts;
        opts.greedy_fallback = p["matching"] == "auto";
        auto r = christofides_detailed(d, opts);
        return {std::move(r.tour), {}, std::move(r.warnings)};
    }
    if (id == "held_karp") return {held_karp(d), {}, {}};

    if (m.kind == MethodKind::rl) {
        const RlConfig config = rl_config(p, budget);
        RlResult r = id == "ql" ? train_q(d, config, start, req.seed) : train_double_q(d, config, start, req.seed);
        return {std::move(r.tour), std::move(r.trace), {}};
    }

    const Tour seed = nearest_neighbor(d, start);
    LocalSearchResult r;
    if (id == "hc") {
        r = hill_climb(seed, d, parse_neighborhood(p["neighborhood"].get<std::string>()), budget);
    } else if (id == "sa") {
        AnnealOptions opts;
        opts.schedule = {p["T0"].get<double>(), p["alpha"].get<double>()};
        opts.neighborhood = parse_neighborhood(p["neighborhood"].get<std::string>());
        opts.cost_scaled = p["cost_scaled"].get<bool>();
        r = simulated_annealing(seed, d, opts, req.seed, budget);
    } else if (id == "tabu") {
        TabuOptions opts;
        opts.tenure = p["tenure"].get<std::size_t>();
        opts.aspiration = p["aspiration"].get<bool>();
        r = tabu_search(seed, d, opts, req.seed, budget);
    } else if (id == "gls") {
        r = guided_local_search(seed, d, GlsOptions{p["lambda_factor"].get<double>()}, req.seed, budget);
    } else {
        throw UnknownMethod(id);
    }
    return {std::move(r.tour), std::move(r.trace), {}};
}

}  // namespace

std::string to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::construction: return "construction";
        case MethodKind::metaheuristic: return "metaheuristic";
        case MethodKind::rl: return "rl";
        case MethodKind::exact: return "exact";
    }
    return "construction";
}

json ParamSpec::to_json() const {
    static const char* names[] = {"number", "integer", "boolean", "choice"};
    json j{{"name", name}, {"type", names[static_cast<int>(type)]}, {"default", default_value}};
    if (min) j[min_exclusive ? "exclusive_min" : "min"] = *min;
    if (max) j[max_exclusive ? "exclusive_max" : "max"] = *max;
    if (!choices.empty()) j["choices"] = choices;
    if (!description.empty()) j["description"] = description;
    return j;
}

json MethodInfo::to_json() const {
    json params_json = json::array();
    for (const auto& p : params) params_json.push_back(p.to_json());
    return {{"id", id},          {"kind", to_string(kind)}, {"stochastic", stochastic},
            {"aliases", aliases}, {"description", description}, {"params", params_json}};
}

const std::vector<MethodInfo>& method_registry() {
    static const std::vector<MethodInfo> registry = build_registry();
    return registry;
}

const MethodInfo* find_method(std::string_view name) {
    const std::string key = lower(name);
    for (const auto& m : method_registry()) {
        if (m.id == key) return &m;
        for (const auto& a : m.aliases)
            if (lower(a) == key) return &m;
    }
    return nullptr;
}

const MethodInfo& require_method(std::string_view name) {
    const MethodInfo* m = find_method(name);
    if (!m) throw UnknownMethod(std::string(name));
    return *m;
}

std::string method_list() {
    std::string out;
    for (const auto& m : method_registry()) out += (out.empty() ? "" : ", ") + m.id;
    return out;
}

json method_catalog() {
    json out = json::array();
    for (const auto& m : method_registry()) out.push_back(m.to_json());
    return out;
}

json resolve_params(const MethodInfo& method, const json& params) {
    if (!params.is_null() && !params.is_object()) throw InvalidParam("params", "expected an object");
    json out = json::object();
    if (params.is_object()) {
        for (const auto& [key, value] : params.items()) {
            const auto it = std::find_if(method.params.begin(), method.params.end(),
                                         [&](const ParamSpec& p) { return p.name == key; });
            if (it == method.params.end())
                throw InvalidParam(key, "unknown parameter for method " + method.id);
            out[key] = check_param(*it, value);
        }
    }
    for (const auto& p : method.params)
        if (!out.contains(p.name)) out[p.name] = p.default_value;
    return out;
}

Budget default_budget(const MethodInfo& method, std::size_t n) {
    if (method.id == "sa") return Budget::iterations(std::clamp<std::uint64_t>(100 * n * n, 20'000, 2'000'000));
    if (method.id == "tabu") return Budget::iterations(std::clamp<std::uint64_t>(4 * n, 100, 4'000));
    if (method.id == "gls") return Budget::iterations(std::clamp<std::uint64_t>(10 * n, 200, 10'000));
    return Budget::unbounded();
}

SolveOutcome solve(const DistanceMatrix& d, const SolveRequest& request) {
    const MethodInfo& method = require_method(request.method);
    const json params = resolve_params(method, request.params);
    request.budget.validate();
    const std::size_t n = d.size();
    if (n < 2) throw std::invalid_argument("a tour needs at least 2 points");
    if (request.start >= n) throw std::invalid_argument("start index out of range");
    const Budget budget = request.budget.bounded() ? request.budget : default_budget(method, n);

    SolveOutcome out;
    out.method = method.id;
    Stopwatch watch;
    RawResult raw;
    if (n <= 3) {
        // Every ordering of three or fewer cities is the same cycle.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        raw.tour = Tour::from_order(std::move(order), d);
    } else {
        raw = run_method(method, d, request, params, budget);
    }
    out.elapsed_ms = watch.elapsed_ms();
    validate_permutation(raw.tour.order, n);
    out.tour = raw.tour.rotated_to(request.start);
    out.trace = std::move(raw.trace);
    if (out.trace.samples.empty()) out.trace.record(out.elapsed_ms, out.tour.length_m);
    out.warnings = std::move(raw.warnings);
    return out;
}

}  // namespace wtsp
