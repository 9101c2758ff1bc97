#include "wtsp/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wtsp {

std::string to_string(CoordKind kind) {
    return kind == CoordKind::geographic ? "geographic" : "planar";
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::haversine: return "haversine";
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::explicit_matrix: return "explicit";
    }
    return "unknown";
}

void WaypointSet::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Waypoint& p = points[i];
        if (p.id != i)
            throw std::invalid_argument("waypoint ids must be dense 0..n-1; position " +
                                        std::to_string(i) + " has id " + std::to_string(p.id));
        if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
            throw std::invalid_argument("waypoint " + std::to_string(i) + " has a non-finite coordinate");
        if (kind == CoordKind::geographic) {
            if (p.lat < -90.0 || p.lat > 90.0)
                throw std::invalid_argument("waypoint " + std::to_string(i) + ": latitude " +
                                            std::to_string(p.lat) + " outside [-90, 90]");
            if (p.lon < -180.0 || p.lon > 180.0)
                throw std::invalid_argument("waypoint " + std::to_string(i) + ": longitude " +
                                            std::to_string(p.lon) + " outside [-180, 180]");
        }
    }
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double to_rad = std::numbers::pi / 180.0;
    const double phi1 = lat1 * to_rad;
    const double phi2 = lat2 * to_rad;
    const double dphi = (lat2 - lat1) * to_rad;
    const double dlambda = (lon2 - lon1) * to_rad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

DistanceMatrix DistanceMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n == 0) throw std::invalid_argument("distance matrix must have at least one row");
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw std::invalid_argument("distance matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = rows[i][j];
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("distance matrix entries must be finite and nonnegative");
            d[i * n + j] = v;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i * n + i] != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[i * n + j] != d[j * n + i])
                throw std::invalid_argument("distance matrix must be symmetric");
    }
    return DistanceMatrix(n, std::move(d), MetricKind::explicit_matrix);
}

DistanceMatrix DistanceMatrix::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("scale factor must be positive and finite");
    std::vector<double> d(d_);
    for (double& v : d) v *= factor;
    return DistanceMatrix(n_, std::move(d), metric_);
}

std::optional<std::array<std::size_t, 3>> DistanceMatrix::find_triangle_violation(
    double rel_tol) const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = i + 1; k < n_; ++k) {
            const double direct = (*this)(i, k);
            for (std::size_t j = 0; j < n_; ++j) {
                if (j == i || j == k) continue;
                const double via = (*this)(i, j) + (*this)(j, k);
                if (direct > via * (1.0 + rel_tol) + rel_tol * std::numeric_limits<double>::min())
                    return std::array<std::size_t, 3>{i, j, k};
            }
        }
    return std::nullopt;
}

DistanceMatrix build_distance_matrix(const WaypointSet& points, MetricKind metric) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("cannot build a distance matrix for zero points");
    points.validate();
    if (metric == MetricKind::explicit_matrix)
        throw std::invalid_argument("explicit matrices are built with DistanceMatrix::from_rows");
    if (metric == MetricKind::haversine && points.kind != CoordKind::geographic)
        throw std::invalid_argument("haversine metric requires geographic coordinates");
    if (metric == MetricKind::euclidean && points.kind != CoordKind::planar)
        throw std::invalid_argument("euclidean metric requires planar coordinates");

    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Waypoint& a = points.points[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Waypoint& b = points.points[j];
            const double v = metric == MetricKind::haversine
                                 ? haversine_m(a.lat, a.lon, b.lat, b.lon)
                                 : std::hypot(a.x() - b.x(), a.y() - b.y());
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return DistanceMatrix(n, std::move(d), metric);
}

DistanceMatrix build_distance_matrix(const WaypointSet& points) {
    return build_distance_matrix(points, points.kind == CoordKind::geographic ? MetricKind::haversine
                                                                              : MetricKind::euclidean);
}

bool is_permutation_of(std::span<const std::size_t> order, std::size_t n) noexcept {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t v : order) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

void validate_permutation(std::span<const std::size_t> order, std::size_t n) {
    if (order.size() != n)
        throw std::invalid_argument("tour has " + std::to_string(order.size()) + " entries, expected " +
                                    std::to_string(n));
    std::vector<bool> seen(n, false);
    for (std::size_t v : order) {
        if (v >= n) throw std::invalid_argument("tour index " + std::to_string(v) + " out of range");
        if (seen[v]) throw std::invalid_argument("tour visits index " + std::to_string(v) + " twice");
        seen[v] = true;
    }
}

double tour_length(std::span<const std::size_t> order, const DistanceMatrix& d) {
    const std::size_t n = d.size();
    if (n < 2) throw std::invalid_argument("tour length needs at least two cities");
    validate_permutation(order, n);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) total += d(order[i], order[i + 1]);
    total += d(order[n - 1], order[0]);
    return total;
}

Tour Tour::from_order(std::vector<std::size_t> order, const DistanceMatrix& d) {
    const double len = tour_length(order, d);
    return Tour{std::move(order), len};
}

Tour Tour::rotated_to(std::size_t first) const {
    const auto it = std::find(order.begin(), order.end(), first);
    if (it == order.end()) throw std::invalid_argument("rotation target not in tour");
    Tour out = *this;
    std::rotate(out.order.begin(), out.order.begin() + (it - order.begin()), out.order.end());
    return out;
}

double gap_to_best(double value, double best) {
    if (!(best > 0.0)) throw std::invalid_argument("gap_to_best requires best > 0");
    return 100.0 * (value - best) / best;
}

bool SolveTrace::is_monotone() const noexcept {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].elapsed_ms < samples[i - 1].elapsed_ms) return false;
        if (samples[i].best_cost_m > samples[i - 1].best_cost_m) return false;
    }
    return true;
}

Tour held_karp(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    if (n < 2 || n > kHeldKarpMaxN)
        throw std::invalid_argument("held_karp supports 2 <= n <= " + std::to_string(kHeldKarpMaxN) +
                                    ", got n = " + std::to_string(n));
    if (n == 2) return Tour::from_order({0, 1}, d);

    // Cities 1..n-1 map to bits 0..m-1. cost[mask][j] is the cheapest way to
    // finish from city j+1 having visited `mask` (which contains j), closing at 0.
    const std::size_t m = n - 1;
    const std::size_t full = (std::size_t{1} << m) - 1;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost((full + 1) * m, inf);
    auto at = [&](std::size_t mask, std::size_t j) -> double& { return cost[mask * m + j]; };

    for (std::size_t j = 0; j < m; ++j) at(full, j) = d(j + 1, 0);
    for (std::size_t mask = full; mask-- > 1;) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            double best = inf;
            for (std::size_t k = 0; k < m; ++k) {
                if (mask & (std::size_t{1} << k)) continue;
                best = std::min(best, d(j + 1, k + 1) + at(mask | (std::size_t{1} << k), k));
            }
            at(mask, j) = best;
        }
    }

    double optimum = inf;
    for (std::size_t k = 0; k < m; ++k) optimum = std::min(optimum, d(0, k + 1) + at(std::size_t{1} << k, k));

    // Forward reconstruction choosing the smallest index that stays optimal.
    const double tol = 1e-9 * std::max(1.0, optimum);
    std::vector<std::size_t> order{0};
    std::size_t mask = 0;
    std::size_t current = 0;
    std::vector<double> via(m);
    while (mask != full) {
        double best_via = inf;
        for (std::size_t k = 0; k < m; ++k) {
            if (mask & (std::size_t{1} << k)) continue;
            via[k] = d(current, k + 1) + at(mask | (std::size_t{1} << k), k);
            best_via = std::min(best_via, via[k]);
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (mask & (std::size_t{1} << k)) continue;
            if (via[k] <= best_via + tol) {
                mask |= std::size_t{1} << k;
                current = k + 1;
                order.push_back(current);
                break;
            }
        }
    }
    return Tour::from_order(std::move(order), d);
}

}  // namespace wtsp
