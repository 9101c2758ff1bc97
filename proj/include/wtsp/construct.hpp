#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wtsp/core.hpp"

namespace wtsp {

struct TreeEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight_m = 0.0;
};

struct SpanningTree {
    std::vector<TreeEdge> edges;
    double total_weight_m = 0.0;
};

/// Nearest unvisited successor at every step, ties to the lowest index.
[[nodiscard]] Tour nearest_neighbor(const DistanceMatrix& d, std::size_t start = 0);

/// Global cheapest-arc construction: edges taken cheapest-first whenever they
/// keep degrees <= 2 and close no premature subcycle.
[[nodiscard]] Tour greedy_edge(const DistanceMatrix& d);

/// Local cheapest-arc construction: a path grown from `start`, extending at
/// whichever endpoint has the cheaper arc to an unvisited city.
[[nodiscard]] Tour local_cheapest_arc(const DistanceMatrix& d, std::size_t start = 0);

enum class InsertionSelector { nearest, farthest, cheapest };
enum class InsertionScope { sequential, parallel };

struct InsertionStrategy {
    InsertionSelector selector = InsertionSelector::cheapest;
    InsertionScope scope = InsertionScope::sequential;
};

/// Insertion family. Sequential scope seeds {start, partner} and ranks the
/// remaining cities once against `start`; parallel scope seeds from the
/// globally cheapest edge and re-evaluates every remaining city each round.
/// Each chosen city is spliced where d(a,c) + d(c,b) - d(a,b) is smallest.
[[nodiscard]] Tour insertion(const DistanceMatrix& d, InsertionStrategy strategy, std::size_t start = 0);

/// Clarke-Wright savings adapted to a single closed tour through `depot`.
[[nodiscard]] Tour savings(const DistanceMatrix& d, std::size_t depot = 0);

/// s(i, j) = d(depot, i) + d(depot, j) - d(i, j).
[[nodiscard]] double saving_value(const DistanceMatrix& d, std::size_t depot, std::size_t i, std::size_t j);

/// Prim's algorithm, O(n^2). Ties go to the lowest (min, max) vertex pair.
[[nodiscard]] SpanningTree mst_prim(const DistanceMatrix& d, std::size_t root = 0);

/// Euler circuit of a connected multigraph with all degrees even (Hierholzer).
[[nodiscard]] std::vector<std::size_t> euler_circuit(std::size_t n,
                                                     std::span<const std::pair<std::size_t, std::size_t>> edges,
                                                     std::size_t start);

/// Keeps the first occurrence of every vertex of a closed walk.
[[nodiscard]] std::vector<std::size_t> shortcut(std::span<const std::size_t> walk, std::size_t n);

/// MST, doubled edges, Euler circuit, shortcut. At most twice the MST weight.
[[nodiscard]] Tour double_tree(const DistanceMatrix& d);

/// Exact minimum-weight perfect matching over `vertices` (even count, at most
/// kExactMatchingMax) by subset dynamic programming.
inline constexpr std::size_t kExactMatchingMax = 18;
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> min_weight_matching(
    const DistanceMatrix& d, std::span<const std::size_t> vertices);

/// Greedy matching followed by pairwise exchange until no exchange helps. No
/// optimality guarantee.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> greedy_matching(
    const DistanceMatrix& d, std::span<const std::size_t> vertices);

struct ChristofidesOptions {
    /// Allow the greedy matching when the odd set exceeds kExactMatchingMax.
    /// Voids the 1.5 bound.
    bool greedy_fallback = false;
    /// Throw instead of warning when an explicit matrix violates the triangle
    /// inequality.
    bool require_metric = false;
};

struct ChristofidesResult {
    Tour tour;
    SpanningTree tree;
    std::vector<std::size_t> odd_vertices;
    std::vector<std::pair<std::size_t, std::size_t>> matching;
    bool exact_matching = true;
    std::vector<std::string> warnings;
};

[[nodiscard]] ChristofidesResult christofides_detailed(const DistanceMatrix& d,
                                                       const ChristofidesOptions& options = {});
[[nodiscard]] Tour christofides(const DistanceMatrix& d, const ChristofidesOptions& options = {});

/// MST weight on V \ {excluded} plus the two cheapest edges at `excluded`.
[[nodiscard]] double one_tree_bound(const DistanceMatrix& d, std::size_t excluded);

/// Strongest 1-tree bound over `candidates` (all vertices when empty).
[[nodiscard]] double one_tree_bound_max(const DistanceMatrix& d, std::span<const std::size_t> candidates = {});

}  // namespace wtsp
