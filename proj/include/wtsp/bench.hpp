#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtsp/budget.hpp"
#include "wtsp/core.hpp"
#include "wtsp/data.hpp"
#include "wtsp/solvers.hpp"

namespace wtsp::bench {

struct SuiteConfig {
    std::vector<std::string> methods;
    std::vector<std::size_t> sizes;
    /// Runs per stochastic method; deterministic methods run once.
    std::size_t repeats = 10;
    std::uint64_t seed = 42;
    Budget budget;
    /// Per-method parameter overrides keyed by canonical id.
    std::map<std::string, nlohmann::json> params;
    std::size_t start = 0;
    std::size_t parallelism = 1;
    /// When set, run_suite writes per-run records and traces here.
    std::optional<std::filesystem::path> out_dir;

    void validate() const;
};

/// Waypoint set for a given size; every method sees the same set.
using DatasetProvider = std::function<WaypointSet(std::size_t n)>;
using SolveFn = std::function<SolveOutcome(const DistanceMatrix&, const SolveRequest&)>;

/// generate_dataset(n, bbox, seed + n).
[[nodiscard]] DatasetProvider synthetic_datasets(std::uint64_t seed, BoundingBox bbox = BoundingBox::default_site());

struct RunRecord {
    RunResult result;
    std::size_t repeat = 0;
    /// Set when the run threw; such runs are left out of the statistics.
    std::optional<std::string> error;
};

/// Population statistics (divide by N).
struct Stats {
    double mean = 0.0;
    double std = 0.0;
    double var = 0.0;
};

/// Two-pass mean and variance over the values in ascending order, so the
/// result does not depend on the order runs finished in.
[[nodiscard]] Stats population_stats(std::span<const double> values);

struct CohortRow {
    std::string method;
    std::size_t size = 0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double mean_len_m = 0.0;
    double min_len_m = 0.0;
    double std_len_m = 0.0;
    double var_len_m = 0.0;
    double mean_time_ms = 0.0;
    double std_time_ms = 0.0;
    double var_time_ms = 0.0;
    /// Against the best mean among methods of the same size.
    double gap_pct = 0.0;

    friend bool operator==(const CohortRow&, const CohortRow&) = default;
};

struct SuiteReport {
    std::vector<CohortRow> rows;
    std::vector<RunRecord> runs;
};

/// Rows ordered by size, then by `method_order`.
[[nodiscard]] SuiteReport aggregate(std::vector<RunRecord> runs, const std::vector<std::string>& method_order);

[[nodiscard]] SuiteReport run_suite(const SuiteConfig& config, const DatasetProvider& datasets,
                                    const SolveFn& solve_fn = solve);

/// Trailing running mean of best_cost_m over `window` samples.
[[nodiscard]] SolveTrace smooth_trace(const SolveTrace& trace, std::size_t window);

[[nodiscard]] std::string trace_to_csv(const SolveTrace& trace);

[[nodiscard]] std::string report_to_csv(const SuiteReport& report);
[[nodiscard]] std::string report_to_json(const SuiteReport& report);
/// One table per size with Method | Tour Len. | Gap to best (%) | Time (s);
/// best rows in bold.
[[nodiscard]] std::string report_to_markdown(const SuiteReport& report);
/// Rows of a report_to_csv document.
[[nodiscard]] SuiteReport parse_report_csv(const std::string& text);

enum class ReportFormat { csv, json, markdown };

/// Writes report.csv / report.json / report.md under `dir`; returns the paths.
std::vector<std::filesystem::path> emit_report(const SuiteReport& report, const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats = {
                                                   ReportFormat::csv, ReportFormat::json, ReportFormat::markdown});

}  // namespace wtsp::bench
