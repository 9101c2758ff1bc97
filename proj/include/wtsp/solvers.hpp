#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wtsp/budget.hpp"
#include "wtsp/core.hpp"

namespace wtsp {

enum class MethodKind { construction, metaheuristic, rl, exact };

[[nodiscard]] std::string to_string(MethodKind kind);

enum class ParamType { number, integer, boolean, choice };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::number;
    nlohmann::json default_value;
    std::optional<double> min;
    std::optional<double> max;
    bool min_exclusive = false;
    bool max_exclusive = false;
    std::vector<std::string> choices;
    std::string description;

    [[nodiscard]] nlohmann::json to_json() const;
};

struct MethodInfo {
    std::string id;
    MethodKind kind = MethodKind::construction;
    /// Results depend on the seed.
    bool stochastic = false;
    std::string description;
    std::vector<std::string> aliases;
    std::vector<ParamSpec> params;

    [[nodiscard]] nlohmann::json to_json() const;
};

class UnknownMethod : public std::invalid_argument {
public:
    explicit UnknownMethod(const std::string& name) : std::invalid_argument("unknown method '" + name + "'"), name_(name) {}
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// A parameter failed validation; `field()` names it.
class InvalidParam : public std::invalid_argument {
public:
    InvalidParam(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Every registered method in a fixed order.
[[nodiscard]] const std::vector<MethodInfo>& method_registry();
/// Looks up an id or alias (aliases are case-insensitive).
[[nodiscard]] const MethodInfo* find_method(std::string_view name);
/// Canonical id for `name`; throws UnknownMethod.
[[nodiscard]] const MethodInfo& require_method(std::string_view name);
/// Comma-separated canonical ids.
[[nodiscard]] std::string method_list();
[[nodiscard]] nlohmann::json method_catalog();

/// Checks `params` against the method schema and fills in defaults. Throws
/// InvalidParam for unknown names, wrong types or out-of-range values.
[[nodiscard]] nlohmann::json resolve_params(const MethodInfo& method, const nlohmann::json& params);

struct SolveRequest {
    std::string method;
    std::uint64_t seed = 0;
    Budget budget;
    nlohmann::json params = nlohmann::json::object();
    std::size_t start = 0;
};

struct SolveOutcome {
    std::string method;
    Tour tour;
    SolveTrace trace;
    double elapsed_ms = 0.0;
    std::vector<std::string> warnings;
};

/// Iteration budget applied to iterative methods when the request sets none.
[[nodiscard]] Budget default_budget(const MethodInfo& method, std::size_t n);

/// Runs one method on `d`. Metaheuristics start from the nearest-neighbour
/// tour at `start`; the returned tour begins at `start`. Timing covers the
/// solve only.
[[nodiscard]] SolveOutcome solve(const DistanceMatrix& d, const SolveRequest& request);

}  // namespace wtsp
