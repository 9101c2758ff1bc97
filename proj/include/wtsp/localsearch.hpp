#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wtsp/budget.hpp"
#include "wtsp/core.hpp"

namespace wtsp {

enum class NeighborhoodKind { adjacent_swap, two_opt, or_opt };

[[nodiscard]] std::string to_string(NeighborhoodKind kind);
[[nodiscard]] NeighborhoodKind parse_neighborhood(const std::string& name);

/// One neighbourhood move over tour positions.
///   adjacent_swap: swap positions i and i+1 (cyclic).
///   two_opt:       reverse positions i..j, 1 <= i < j <= n-1.
///   or_opt:        move the segment of `len` cities starting at i to follow
///                  position j, reversed when `reversed`.
struct Move {
    NeighborhoodKind kind = NeighborhoodKind::two_opt;
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t len = 1;
    bool reversed = false;
};

/// Change in tour cost if `move` were applied, under the edge cost `cost`.
template <class EdgeCost>
[[nodiscard]] double move_delta(const std::vector<std::size_t>& order, const Move& move, EdgeCost&& cost);

[[nodiscard]] double move_delta(const std::vector<std::size_t>& order, const Move& move, const DistanceMatrix& d);

void apply_move(std::vector<std::size_t>& order, const Move& move);

/// Every move of the neighbourhood for a tour of n cities, in a fixed order.
/// Empty for n < 4 (all tours coincide).
[[nodiscard]] std::vector<Move> enumerate_moves(NeighborhoodKind kind, std::size_t n);

/// A uniformly drawn move, for n >= 4.
[[nodiscard]] Move random_move(NeighborhoodKind kind, std::size_t n, std::mt19937_64& rng);

/// Relative slack below which a delta does not count as an improvement.
inline constexpr double kImprovementTolerance = 1e-10;

struct LocalSearchResult {
    Tour tour;
    SolveTrace trace;
    std::uint64_t iterations = 0;
    /// True when the search stopped on its own rather than on the budget.
    bool converged = false;
};

/// min(1, exp(-delta / T)).
[[nodiscard]] double acceptance_probability(double delta, double temperature);

/// Geometric cooling T_k = alpha^k * T0.
struct AnnealSchedule {
    double t0 = 1.0;
    double alpha = 0.99;

    void validate() const;
    [[nodiscard]] double temperature(std::uint64_t step) const;
};

/// Best-improvement descent. One iteration is one full neighbourhood scan.
[[nodiscard]] LocalSearchResult hill_climb(const Tour& seed, const DistanceMatrix& d,
                                           NeighborhoodKind neighborhood = NeighborhoodKind::two_opt,
                                           const Budget& budget = Budget::unbounded());

struct AnnealOptions {
    AnnealSchedule schedule{};
    NeighborhoodKind neighborhood = NeighborhoodKind::two_opt;
    /// Multiply T0 by the seed tour length so probabilities do not depend on
    /// the unit of distance.
    bool cost_scaled = true;
};

/// Random-proposal annealing; one iteration is one proposal and one cooling
/// step. Stops early once the temperature is frozen and no improving move
/// remains.
[[nodiscard]] LocalSearchResult simulated_annealing(const Tour& seed, const DistanceMatrix& d,
                                                    const AnnealOptions& options, std::uint64_t rng_seed,
                                                    const Budget& budget);

/// Recently removed edges with their expiry iteration. Entries are appended
/// with nondecreasing expiry, so pruning only ever drops from the front.
class TabuList {
public:
    explicit TabuList(std::size_t n) : n_(n), expiry_(n * n, 0) {}

    void add(std::size_t a, std::size_t b, std::uint64_t expires_at);
    /// True when re-adding edge (a, b) at `iteration` is forbidden.
    [[nodiscard]] bool is_tabu(std::size_t a, std::size_t b, std::uint64_t iteration) const noexcept {
        return expiry_[a * n_ + b] > iteration;
    }
    void prune(std::uint64_t iteration);
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size() - head_; }

private:
    struct Entry {
        std::size_t a;
        std::size_t b;
        std::uint64_t expires_at;
    };
    std::size_t n_;
    std::vector<std::uint64_t> expiry_;
    std::vector<Entry> entries_;
    std::size_t head_ = 0;
};

/// Default tabu tenure, max(10, n / 4).
[[nodiscard]] std::size_t default_tenure(std::size_t n);

struct TabuOptions {
    /// 0 selects default_tenure(n).
    std::size_t tenure = 0;
    bool aspiration = true;
};

/// Two-opt tabu search. Edges removed by a move may not be re-added for
/// `tenure` iterations unless the move beats the best tour so far.
[[nodiscard]] LocalSearchResult tabu_search(const Tour& seed, const DistanceMatrix& d, const TabuOptions& options,
                                            std::uint64_t rng_seed, const Budget& budget);

/// Edge penalties for guided local search.
class PenaltyTable {
public:
    explicit PenaltyTable(std::size_t n) : n_(n), p_(n * n, 0) {}

    [[nodiscard]] std::uint32_t operator()(std::size_t a, std::size_t b) const noexcept { return p_[a * n_ + b]; }
    void increment(std::size_t a, std::size_t b) noexcept {
        ++p_[a * n_ + b];
        ++p_[b * n_ + a];
    }
    /// Sum of penalties over the edges of `order`.
    [[nodiscard]] std::uint64_t tour_penalty(const std::vector<std::size_t>& order) const noexcept;

    /// Penalises every maximum-utility edge of `order`, u_e = d_e / (1 + p_e).
    /// Returns the edges penalised.
    std::vector<std::pair<std::size_t, std::size_t>> penalize_max_utility(const std::vector<std::size_t>& order,
                                                                          const DistanceMatrix& d);

private:
    std::size_t n_;
    std::vector<std::uint32_t> p_;
};

struct GlsOptions {
    double lambda_factor = 0.1;
};

/// Guided local search: two-opt descent on length + lambda * penalties, with
/// penalty escalation at every local minimum. lambda = lambda_factor * L0 / n.
/// Iterations are neighbourhood scans, as in hill_climb.
[[nodiscard]] LocalSearchResult guided_local_search(const Tour& seed, const DistanceMatrix& d,
                                                    const GlsOptions& options, std::uint64_t rng_seed,
                                                    const Budget& budget);

// ---------------------------------------------------------------------------

template <class EdgeCost>
double move_delta(const std::vector<std::size_t>& order, const Move& move, EdgeCost&& cost) {
    const std::size_t n = order.size();
    auto at = [&](std::size_t pos) { return order[pos % n]; };
    switch (move.kind) {
        case NeighborhoodKind::adjacent_swap: {
            const std::size_t p = at(move.i + n - 1), a = at(move.i), b = at(move.i + 1), q = at(move.i + 2);
            if (p == b) return 0.0;
            return cost(p, b) + cost(a, q) - cost(p, a) - cost(b, q);
        }
        case NeighborhoodKind::two_opt: {
            const std::size_t a = at(move.i - 1), b = at(move.i), c = at(move.j), e = at(move.j + 1);
            if (a == c || b == e) return 0.0;
            return cost(a, c) + cost(b, e) - cost(a, b) - cost(c, e);
        }
        case NeighborhoodKind::or_opt: {
            const std::size_t p = at(move.i + n - 1), f = at(move.i), l = at(move.i + move.len - 1),
                              nx = at(move.i + move.len), a = at(move.j), b = at(move.j + 1);
            const std::size_t first = move.reversed ? l : f;
            const std::size_t last = move.reversed ? f : l;
            return cost(p, nx) - cost(p, f) - cost(l, nx) + cost(a, first) + cost(last, b) - cost(a, b);
        }
    }
    return 0.0;
}

}  // namespace wtsp
