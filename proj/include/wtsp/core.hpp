#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wtsp {

/// Mean Earth radius used for every great-circle computation, meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Raised when a parse of an external file or body fails. `line()` is 1-based,
/// 0 when no line applies.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A wall-clock budget expired before a solver produced any tour.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CoordKind { geographic, planar };
enum class MetricKind { haversine, euclidean, explicit_matrix };

[[nodiscard]] std::string to_string(CoordKind kind);
[[nodiscard]] std::string to_string(MetricKind kind);

/// One point of interest. For planar sets `lat` holds y and `lon` holds x, both
/// in meters.
struct Waypoint {
    std::size_t id = 0;
    double lat = 0.0;
    double lon = 0.0;

    [[nodiscard]] double x() const noexcept { return lon; }
    [[nodiscard]] double y() const noexcept { return lat; }

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct WaypointSet {
    CoordKind kind = CoordKind::geographic;
    std::vector<Waypoint> points;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] bool empty() const noexcept { return points.empty(); }

    /// Throws std::invalid_argument when ids are not 0..n-1 in order or a
    /// geographic coordinate is out of range.
    void validate() const;

    friend bool operator==(const WaypointSet&, const WaypointSet&) = default;
};

/// Great-circle distance on the sphere of radius kEarthRadiusM.
[[nodiscard]] double haversine_m(double lat1, double lon1, double lat2, double lon2);

/// Immutable symmetric cost matrix in meters, zero on the diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    /// Builds from explicit rows. Rejects asymmetric, non-finite, negative or
    /// non-zero-diagonal input.
    static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] MetricKind metric() const noexcept { return metric_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
        return d_[i * n_ + j];
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {d_.data() + i * n_, n_};
    }
    [[nodiscard]] DistanceMatrix scaled(double factor) const;

    /// First triangle-inequality violation beyond `rel_tol`, as (i, j, k) with
    /// d(i,k) > d(i,j) + d(j,k). O(n^3).
    [[nodiscard]] std::optional<std::array<std::size_t, 3>> find_triangle_violation(
        double rel_tol = 1e-6) const;

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    friend DistanceMatrix build_distance_matrix(const WaypointSet&, MetricKind);
    DistanceMatrix(std::size_t n, std::vector<double> d, MetricKind metric)
        : n_(n), d_(std::move(d)), metric_(metric) {}

    std::size_t n_ = 0;
    std::vector<double> d_;
    MetricKind metric_ = MetricKind::explicit_matrix;
};

/// Haversine for geographic sets, Euclidean for planar ones. The metric must
/// match the set's coordinate kind.
[[nodiscard]] DistanceMatrix build_distance_matrix(const WaypointSet& points, MetricKind metric);

/// Picks the metric that matches the set's coordinate kind.
[[nodiscard]] DistanceMatrix build_distance_matrix(const WaypointSet& points);

/// Closed-cycle length of `order`. Throws when `order` is not a permutation of
/// 0..n-1 or has fewer than two entries.
[[nodiscard]] double tour_length(std::span<const std::size_t> order, const DistanceMatrix& d);

/// Throws std::invalid_argument describing the first defect.
void validate_permutation(std::span<const std::size_t> order, std::size_t n);
[[nodiscard]] bool is_permutation_of(std::span<const std::size_t> order, std::size_t n) noexcept;

/// A visit order, implicitly closed back to order.front().
struct Tour {
    std::vector<std::size_t> order;
    double length_m = 0.0;

    /// Validates `order` against `d` and computes its length.
    static Tour from_order(std::vector<std::size_t> order, const DistanceMatrix& d);

    /// Same cycle, rotated so `first` comes first.
    [[nodiscard]] Tour rotated_to(std::size_t first) const;

    friend bool operator==(const Tour&, const Tour&) = default;
};

/// 100 * (value - best) / best.
[[nodiscard]] double gap_to_best(double value, double best);

/// Anytime record of best-so-far cost.
struct TracePoint {
    double elapsed_ms = 0.0;
    double best_cost_m = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct SolveTrace {
    std::vector<TracePoint> samples;

    void record(double elapsed_ms, double best_cost_m) { samples.push_back({elapsed_ms, best_cost_m}); }
    /// Timestamps nondecreasing and costs nonincreasing.
    [[nodiscard]] bool is_monotone() const noexcept;
};

struct RunResult {
    std::string method;
    std::size_t size = 0;
    double tour_len_m = 0.0;
    double gap_pct = 0.0;
    double elapsed_ms = 0.0;
    std::uint64_t seed = 0;
    std::optional<SolveTrace> trace;
};

inline constexpr std::size_t kHeldKarpMaxN = 18;

/// Exact optimum by bitmask dynamic programming, 2 <= n <= 18. Among optimal
/// tours, returns the lexicographically smallest order beginning at 0.
[[nodiscard]] Tour held_karp(const DistanceMatrix& d);

}  // namespace wtsp
