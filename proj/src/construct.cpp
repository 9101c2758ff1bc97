#include "wtsp/construct.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace wtsp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_size(const DistanceMatrix& d, std::size_t min_n, const char* what) {
    if (d.size() < min_n)
        throw std::invalid_argument(std::string(what) + " requires n >= " + std::to_string(min_n) +
                                    ", got " + std::to_string(d.size()));
}

void require_index(std::size_t index, std::size_t n, const char* what) {
    if (index >= n)
        throw std::out_of_range(std::string(what) + " " + std::to_string(index) + " out of range for n = " +
                                std::to_string(n));
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

struct WeightedPair {
    double w;
    std::size_t i;
    std::size_t j;
};

std::vector<WeightedPair> sorted_pairs(const DistanceMatrix& d, std::span<const std::size_t> vertices) {
    std::vector<WeightedPair> pairs;
    pairs.reserve(vertices.size() * (vertices.size() - 1) / 2);
    for (std::size_t a = 0; a < vertices.size(); ++a)
        for (std::size_t b = a + 1; b < vertices.size(); ++b) {
            const std::size_t i = std::min(vertices[a], vertices[b]);
            const std::size_t j = std::max(vertices[a], vertices[b]);
            pairs.push_back({d(i, j), i, j});
        }
    std::sort(pairs.begin(), pairs.end(), [](const WeightedPair& x, const WeightedPair& y) {
        return std::tie(x.w, x.i, x.j) < std::tie(y.w, y.i, y.j);
    });
    return pairs;
}

// Walks a Hamiltonian cycle given as two-neighbour adjacency, starting at
// `first` and heading to its lower-indexed neighbour.
std::vector<std::size_t> walk_cycle(const std::vector<std::array<std::size_t, 2>>& adj, std::size_t first) {
    const std::size_t n = adj.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::size_t prev = first;
    std::size_t cur = first;
    order.push_back(first);
    std::size_t next = std::min(adj[first][0], adj[first][1]);
    while (order.size() < n) {
        prev = cur;
        cur = next;
        order.push_back(cur);
        next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
    }
    return order;
}

double prim_weight_excluding(const DistanceMatrix& d, std::size_t excluded) {
    const std::size_t n = d.size();
    std::vector<bool> in_tree(n, false);
    std::vector<double> key(n, kInf);
    in_tree[excluded] = true;
    const std::size_t root = excluded == 0 ? 1 : 0;
    key[root] = 0.0;
    double total = 0.0;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t v = n;
        for (std::size_t u = 0; u < n; ++u)
            if (!in_tree[u] && (v == n || key[u] < key[v])) v = u;
        in_tree[v] = true;
        total += key[v];
        for (std::size_t u = 0; u < n; ++u)
            if (!in_tree[u]) key[u] = std::min(key[u], d(v, u));
    }
    return total;
}

}  // namespace

Tour nearest_neighbor(const DistanceMatrix& d, std::size_t start) {
    const std::size_t n = d.size();
    require_size(d, 2, "nearest_neighbor");
    require_index(start, n, "start");
    std::vector<bool> visited(n, false);
    std::vector<std::size_t> order{start};
    order.reserve(n);
    visited[start] = true;
    std::size_t cur = start;
    while (order.size() < n) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!visited[j] && (best == n || d(cur, j) < d(cur, best))) best = j;
        visited[best] = true;
        order.push_back(best);
        cur = best;
    }
    return Tour::from_order(std::move(order), d);
}

Tour greedy_edge(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    require_size(d, 3, "greedy_edge");
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    DisjointSets sets(n);
    std::vector<std::size_t> degree(n, 0);
    std::vector<std::array<std::size_t, 2>> adj(n, {n, n});
    std::size_t accepted = 0;
    for (const auto& e : sorted_pairs(d, all)) {
        if (accepted == n - 1) break;
        if (degree[e.i] >= 2 || degree[e.j] >= 2) continue;
        if (!sets.unite(e.i, e.j)) continue;
        adj[e.i][degree[e.i]++] = e.j;
        adj[e.j][degree[e.j]++] = e.i;
        ++accepted;
    }
    // The fragments now form one Hamiltonian path; close it.
    std::size_t a = n, b = n;
    for (std::size_t v = 0; v < n; ++v)
        if (degree[v] < 2) (a == n ? a : b) = v;
    adj[a][degree[a]++] = b;
    adj[b][degree[b]++] = a;
    return Tour::from_order(walk_cycle(adj, 0), d);
}

Tour local_cheapest_arc(const DistanceMatrix& d, std::size_t start) {
    const std::size_t n = d.size();
    require_size(d, 2, "local_cheapest_arc");
    require_index(start, n, "start");
    std::vector<bool> visited(n, false);
    std::deque<std::size_t> path{start};
    visited[start] = true;
    auto nearest_from = [&](std::size_t from) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!visited[j] && (best == n || d(from, j) < d(from, best))) best = j;
        return best;
    };
    while (path.size() < n) {
        const std::size_t at_back = nearest_from(path.back());
        const std::size_t at_front = nearest_from(path.front());
        if (d(path.front(), at_front) < d(path.back(), at_back)) {
            path.push_front(at_front);
            visited[at_front] = true;
        } else {
            path.push_back(at_back);
            visited[at_back] = true;
        }
    }
    return Tour::from_order({path.begin(), path.end()}, d);
}

Tour insertion(const DistanceMatrix& d, InsertionStrategy strategy, std::size_t start) {
    const std::size_t n = d.size();
    require_size(d, 3, "insertion");
    require_index(start, n, "start");
    const auto selector = strategy.selector;
    if (selector != InsertionSelector::nearest && selector != InsertionSelector::farthest &&
        selector != InsertionSelector::cheapest)
        throw std::invalid_argument("unknown insertion selector");
    if (strategy.scope != InsertionScope::sequential && strategy.scope != InsertionScope::parallel)
        throw std::invalid_argument("unknown insertion scope");

    // Cycle as a successor array; `next[v] == n` marks v as not yet inserted.
    std::vector<std::size_t> next(n, n);
    std::vector<std::size_t> members;
    members.reserve(n);
    auto splice = [&](std::size_t a, std::size_t c) {
        next[c] = next[a];
        next[a] = c;
        members.push_back(c);
    };
    auto delta = [&](std::size_t a, std::size_t c) { return d(a, c) + d(c, next[a]) - d(a, next[a]); };
    // Cheapest edge for c, ties to the lowest tail index.
    auto best_tail = [&](std::size_t c) {
        std::size_t tail = n;
        double best = kInf;
        for (std::size_t a : members) {
            const double v = delta(a, c);
            if (v < best || (v == best && a < tail)) {
                best = v;
                tail = a;
            }
        }
        return std::pair{tail, best};
    };

    std::size_t seed_a = start, seed_b = n;
    if (strategy.scope == InsertionScope::sequential) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == start) continue;
            if (seed_b == n) {
                seed_b = j;
                continue;
            }
            const bool better = selector == InsertionSelector::farthest ? d(start, j) > d(start, seed_b)
                                                                        : d(start, j) < d(start, seed_b);
            if (better) seed_b = j;
        }
    } else {
        double best = kInf;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (d(i, j) < best) {
                    best = d(i, j);
                    seed_a = i;
                    seed_b = j;
                }
    }
    next[seed_a] = seed_b;
    next[seed_b] = seed_a;
    members = {seed_a, seed_b};

    if (strategy.scope == InsertionScope::sequential) {
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t c = 0; c < n; ++c) {
            if (c == seed_a || c == seed_b) continue;
            double key = d(start, c);
            if (selector == InsertionSelector::farthest) key = -key;
            if (selector == InsertionSelector::cheapest) key = d(seed_a, c) + d(c, seed_b) - d(seed_a, seed_b);
            ranked.emplace_back(key, c);
        }
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [key, c] : ranked) splice(best_tail(c).first, c);
    } else if (selector == InsertionSelector::cheapest) {
        std::vector<std::size_t> tail(n, n);
        std::vector<double> cost(n, kInf);
        for (std::size_t c = 0; c < n; ++c)
            if (next[c] == n) std::tie(tail[c], cost[c]) = best_tail(c);
        while (members.size() < n) {
            std::size_t pick = n;
            for (std::size_t c = 0; c < n; ++c)
                if (next[c] == n && (pick == n || cost[c] < cost[pick])) pick = c;
            const std::size_t a = tail[pick];
            splice(a, pick);
            for (std::size_t c = 0; c < n; ++c) {
                if (next[c] != n) continue;
                if (tail[c] == a) {
                    std::tie(tail[c], cost[c]) = best_tail(c);
                    continue;
                }
                for (std::size_t t : {a, pick}) {
                    const double v = delta(t, c);
                    if (v < cost[c] || (v == cost[c] && t < tail[c])) {
                        cost[c] = v;
                        tail[c] = t;
                    }
                }
            }
        }
    } else {
        std::vector<double> near(n, kInf);
        for (std::size_t c = 0; c < n; ++c)
            if (next[c] == n) near[c] = std::min(d(c, seed_a), d(c, seed_b));
        while (members.size() < n) {
            std::size_t pick = n;
            for (std::size_t c = 0; c < n; ++c) {
                if (next[c] != n) continue;
                if (pick == n) {
                    pick = c;
                    continue;
                }
                const bool better = selector == InsertionSelector::farthest ? near[c] > near[pick]
                                                                            : near[c] < near[pick];
                if (better) pick = c;
            }
            splice(best_tail(pick).first, pick);
            for (std::size_t c = 0; c < n; ++c)
                if (next[c] == n) near[c] = std::min(near[c], d(c, pick));
        }
    }

    std::vector<std::size_t> order{start};
    while (order.size() < n) order.push_back(next[order.back()]);
    return Tour::from_order(std::move(order), d);
}

double saving_value(const DistanceMatrix& d, std::size_t depot, std::size_t i, std::size_t j) {
    return d(depot, i) + d(depot, j) - d(i, j);
}

Tour savings(const DistanceMatrix& d, std::size_t depot) {
    const std::size_t n = d.size();
    require_size(d, 3, "savings");
    require_index(depot, n, "depot");

    struct Saving {
        double s;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Saving> list;
    list.reserve((n - 1) * (n - 2) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == depot) continue;
        for (std::size_t j = i + 1; j < n; ++j)
            if (j != depot) list.push_back({saving_value(d, depot, i, j), i, j});
    }
    std::sort(list.begin(), list.end(), [](const Saving& a, const Saving& b) {
        if (a.s != b.s) return a.s > b.s;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });

    // Route fragments between customers; every fragment end links to the depot.
    DisjointSets sets(n);
    std::vector<std::size_t> degree(n, 0);
    std::vector<std::array<std::size_t, 2>> adj(n, {n, n});
    std::size_t links = 0;
    for (const auto& s : list) {
        if (links == n - 2) break;
        if (degree[s.i] >= 2 || degree[s.j] >= 2) continue;
        if (!sets.unite(s.i, s.j)) continue;
        adj[s.i][degree[s.i]++] = s.j;
        adj[s.j][degree[s.j]++] = s.i;
        ++links;
    }
    std::size_t a = n, b = n;
    for (std::size_t v = 0; v < n; ++v) {
        if (v == depot) continue;
        if (degree[v] == 0) a = b = v;
        else if (degree[v] == 1) (a == n ? a : b) = v;
    }
    std::vector<std::size_t> order{depot};
    std::size_t prev = depot;
    std::size_t cur = std::min(a, b);
    while (cur != n && order.size() < n) {
        order.push_back(cur);
        const std::size_t nxt = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
        prev = cur;
        cur = nxt;
    }
    return Tour::from_order(std::move(order), d);
}

SpanningTree mst_prim(const DistanceMatrix& d, std::size_t root) {
    const std::size_t n = d.size();
    require_size(d, 2, "mst_prim");
    require_index(root, n, "root");
    auto pair_of = [](std::size_t a, std::size_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };

    std::vector<bool> in_tree(n, false);
    std::vector<double> key(n, kInf);
    std::vector<std::size_t> parent(n, root);
    in_tree[root] = true;
    for (std::size_t u = 0; u < n; ++u)
        if (u != root) key[u] = d(root, u);

    SpanningTree tree;
    tree.edges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t v = n;
        for (std::size_t u = 0; u < n; ++u) {
            if (in_tree[u]) continue;
            if (v == n || key[u] < key[v] || (key[u] == key[v] && pair_of(parent[u], u) < pair_of(parent[v], v)))
                v = u;
        }
        in_tree[v] = true;
        tree.edges.push_back({parent[v], v, key[v]});
        tree.total_weight_m += key[v];
        for (std::size_t u = 0; u < n; ++u) {
            if (in_tree[u]) continue;
            const double w = d(v, u);
            if (w < key[u] || (w == key[u] && pair_of(v, u) < pair_of(parent[u], u))) {
                key[u] = w;
                parent[u] = v;
            }
        }
    }
    return tree;
}

std::vector<std::size_t> euler_circuit(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
                                       std::size_t start) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        if (u >= n || v >= n) throw std::out_of_range("euler_circuit edge endpoint out of range");
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
    }
    for (const auto& a : adj)
        if (a.size() % 2 != 0) throw std::invalid_argument("euler_circuit requires all degrees even");

    std::vector<bool> used(edges.size(), false);
    std::vector<std::size_t> cursor(n, 0);
    std::vector<std::size_t> stack{start};
    std::vector<std::size_t> circuit;
    circuit.reserve(edges.size() + 1);
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        auto& pos = cursor[v];
        while (pos < adj[v].size() && used[adj[v][pos].second]) ++pos;
        if (pos == adj[v].size()) {
            circuit.push_back(v);
            stack.pop_back();
        } else {
            used[adj[v][pos].second] = true;
            stack.push_back(adj[v][pos].first);
        }
    }
    if (circuit.size() != edges.size() + 1) throw std::invalid_argument("euler_circuit: multigraph not connected");
    std::reverse(circuit.begin(), circuit.end());
    return circuit;
}

std::vector<std::size_t> shortcut(std::span<const std::size_t> walk, std::size_t n) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t v : walk) {
        if (seen[v]) continue;
        seen[v] = true;
        order.push_back(v);
    }
    return order;
}

Tour double_tree(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    require_size(d, 3, "double_tree");
    const SpanningTree tree = mst_prim(d, 0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(2 * tree.edges.size());
    for (const auto& e : tree.edges) {
        edges.emplace_back(e.u, e.v);
        edges.emplace_back(e.u, e.v);
    }
    const auto walk = euler_circuit(n, edges, 0);
    return Tour::from_order(shortcut(walk, n), d);
}

std::vector<std::pair<std::size_t, std::size_t>> min_weight_matching(const DistanceMatrix& d,
                                                                    std::span<const std::size_t> vertices) {
    const std::size_t k = vertices.size();
    if (k % 2 != 0) throw std::invalid_argument("perfect matching needs an even vertex count");
    if (k > kExactMatchingMax)
        throw std::invalid_argument("exact matching supports at most " + std::to_string(kExactMatchingMax) +
                                    " vertices, got " + std::to_string(k));
    if (k == 0) return {};
    const std::size_t full = (std::size_t{1} << k) - 1;
    std::vector<double> cost(full + 1, kInf);
    std::vector<std::uint8_t> partner(full + 1, 0);
    cost[0] = 0.0;
    for (std::size_t mask = 1; mask <= full; ++mask) {
        if (std::popcount(mask) % 2 != 0) continue;
        const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
        for (std::size_t j = i + 1; j < k; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            const std::size_t rest = mask & ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
            const double v = cost[rest] + d(vertices[i], vertices[j]);
            if (v < cost[mask]) {
                cost[mask] = v;
                partner[mask] = static_cast<std::uint8_t>(j);
            }
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t mask = full; mask != 0;) {
        const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
        const std::size_t j = partner[mask];
        pairs.emplace_back(vertices[i], vertices[j]);
        mask &= ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
    }
    return pairs;
}

std::vector<std::pair<std::size_t, std::size_t>> greedy_matching(const DistanceMatrix& d,
                                                                std::span<const std::size_t> vertices) {
    if (vertices.size() % 2 != 0) throw std::invalid_argument("perfect matching needs an even vertex count");
    std::vector<bool> matched(d.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& e : sorted_pairs(d, vertices)) {
        if (matched[e.i] || matched[e.j]) continue;
        matched[e.i] = matched[e.j] = true;
        pairs.emplace_back(e.i, e.j);
    }
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t p = 0; p < pairs.size(); ++p)
            for (std::size_t q = p + 1; q < pairs.size(); ++q) {
                auto& [a, b] = pairs[p];
                auto& [c, e] = pairs[q];
                const double now = d(a, b) + d(c, e);
                const double cross1 = d(a, c) + d(b, e);
                const double cross2 = d(a, e) + d(b, c);
                const double tol = 1e-12 * std::max(1.0, now);
                if (cross1 < now - tol && cross1 <= cross2) {
                    std::swap(b, c);
                    improved = true;
                } else if (cross2 < now - tol) {
                    std::swap(b, e);
                    improved = true;
                }
            }
    }
    return pairs;
}

ChristofidesResult christofides_detailed(const DistanceMatrix& d, const ChristofidesOptions& options) {
    const std::size_t n = d.size();
    require_size(d, 3, "christofides");
    ChristofidesResult result;

    if (d.metric() == MetricKind::explicit_matrix) {
        if (const auto bad = d.find_triangle_violation(1e-6)) {
            const std::string msg = "distance matrix violates the triangle inequality at (" +
                                    std::to_string((*bad)[0]) + ", " + std::to_string((*bad)[1]) + ", " +
                                    std::to_string((*bad)[2]) + "); the 1.5 bound does not hold";
            if (options.require_metric) throw std::invalid_argument(msg);
            result.warnings.push_back(msg);
        }
    }

    result.tree = mst_prim(d, 0);
    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : result.tree.edges) {
        ++degree[e.u];
        ++degree[e.v];
    }
    for (std::size_t v = 0; v < n; ++v)
        if (degree[v] % 2 != 0) result.odd_vertices.push_back(v);

    if (result.odd_vertices.size() <= kExactMatchingMax) {
        result.matching = min_weight_matching(d, result.odd_vertices);
    } else if (options.greedy_fallback) {
        result.matching = greedy_matching(d, result.odd_vertices);
        result.exact_matching = false;
        result.warnings.push_back("odd-degree set of " + std::to_string(result.odd_vertices.size()) +
                                  " vertices exceeds the exact matching limit; greedy matching used, "
                                  "the 1.5 bound does not hold");
    } else {
        throw std::invalid_argument("christofides: odd-degree set of " +
                                    std::to_string(result.odd_vertices.size()) +
                                    " vertices exceeds the exact matching limit of " +
                                    std::to_string(kExactMatchingMax) + " and greedy fallback is disabled");
    }

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(result.tree.edges.size() + result.matching.size());
    for (const auto& e : result.tree.edges) edges.emplace_back(e.u, e.v);
    for (const auto& m : result.matching) edges.push_back(m);
    const auto walk = euler_circuit(n, edges, 0);
    result.tour = Tour::from_order(shortcut(walk, n), d);
    return result;
}

Tour christofides(const DistanceMatrix& d, const ChristofidesOptions& options) {
    return christofides_detailed(d, options).tour;
}

double one_tree_bound(const DistanceMatrix& d, std::size_t excluded) {
    const std::size_t n = d.size();
    require_size(d, 3, "one_tree_bound");
    require_index(excluded, n, "excluded vertex");
    double first = kInf, second = kInf;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == excluded) continue;
        const double w = d(excluded, j);
        if (w < first) {
            second = first;
            first = w;
        } else if (w < second) {
            second = w;
        }
    }
    return prim_weight_excluding(d, excluded) + first + second;
}

double one_tree_bound_max(const DistanceMatrix& d, std::span<const std::size_t> candidates) {
    double best = -kInf;
    if (candidates.empty()) {
        for (std::size_t v = 0; v < d.size(); ++v) best = std::max(best, one_tree_bound(d, v));
    } else {
        for (std::size_t v : candidates) best = std::max(best, one_tree_bound(d, v));
    }
    return best;
}

}  // namespace wtsp
