#include "wtsp/localsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wtsp {
namespace {

std::size_t max_segment(std::size_t n) { return std::min<std::size_t>(3, n - 2); }

// Visits every move in the order enumerate_moves() lists them. The callback
// returns false to stop early.
template <class F>
void for_each_move(NeighborhoodKind kind, std::size_t n, F&& f) {
    if (n < 4) return;
    switch (kind) {
        case NeighborhoodKind::adjacent_swap:
            for (std::size_t i = 0; i < n; ++i)
                if (!f(Move{kind, i, 0, 1, false})) return;
            return;
        case NeighborhoodKind::two_opt:
            for (std::size_t i = 1; i + 1 < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (i == 1 && j == n - 1) continue;
                    if (!f(Move{kind, i, j, 1, false})) return;
                }
            return;
        case NeighborhoodKind::or_opt:
            for (std::size_t len = 1; len <= max_segment(n); ++len)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t off = len; off + 1 < n; ++off)
                        for (int rev = 0; rev < (len > 1 ? 2 : 1); ++rev)
                            if (!f(Move{kind, i, (i + off) % n, len, rev == 1})) return;
            return;
    }
}

struct ScanResult {
    Move move{};
    double delta = std::numeric_limits<double>::infinity();
};

template <class EdgeCost>
ScanResult best_move(const std::vector<std::size_t>& order, NeighborhoodKind kind, EdgeCost&& cost) {
    ScanResult best;
    for_each_move(kind, order.size(), [&](const Move& m) {
        const double delta = move_delta(order, m, cost);
        if (delta < best.delta) {
            best.delta = delta;
            best.move = m;
        }
        return true;
    });
    return best;
}

Tour checked_seed(const Tour& seed, const DistanceMatrix& d) {
    if (seed.order.size() != d.size())
        throw std::invalid_argument("seed tour size does not match the distance matrix");
    return Tour::from_order(seed.order, d);
}

void require_bounded(const Budget& budget, const char* what) {
    budget.validate();
    if (!budget.bounded()) throw std::invalid_argument(std::string(what) + " needs an iteration or time budget");
}

}  // namespace

std::string to_string(NeighborhoodKind kind) {
    switch (kind) {
        case NeighborhoodKind::adjacent_swap: return "adjacent_swap";
        case NeighborhoodKind::two_opt: return "two_opt";
        case NeighborhoodKind::or_opt: return "or_opt";
    }
    return "unknown";
}

NeighborhoodKind parse_neighborhood(const std::string& name) {
    if (name == "adjacent_swap") return NeighborhoodKind::adjacent_swap;
    if (name == "two_opt") return NeighborhoodKind::two_opt;
    if (name == "or_opt") return NeighborhoodKind::or_opt;
    throw std::invalid_argument("unknown neighborhood '" + name + "' (expected adjacent_swap, two_opt or or_opt)");
}

double move_delta(const std::vector<std::size_t>& order, const Move& move, const DistanceMatrix& d) {
    return move_delta(order, move, [&d](std::size_t a, std::size_t b) { return d(a, b); });
}

void apply_move(std::vector<std::size_t>& order, const Move& move) {
    const std::size_t n = order.size();
    switch (move.kind) {
        case NeighborhoodKind::adjacent_swap:
            std::swap(order[move.i % n], order[(move.i + 1) % n]);
            return;
        case NeighborhoodKind::two_opt:
            std::reverse(order.begin() + static_cast<std::ptrdiff_t>(move.i),
                         order.begin() + static_cast<std::ptrdiff_t>(move.j) + 1);
            return;
        case NeighborhoodKind::or_opt: {
            std::vector<std::size_t> segment(move.len);
            for (std::size_t k = 0; k < move.len; ++k) segment[k] = order[(move.i + k) % n];
            if (move.reversed) std::reverse(segment.begin(), segment.end());
            const std::size_t anchor = order[move.j % n];
            std::vector<std::size_t> out;
            out.reserve(n);
            for (std::size_t k = move.len; k < n; ++k) {
                const std::size_t v = order[(move.i + k) % n];
                out.push_back(v);
                if (v == anchor) out.insert(out.end(), segment.begin(), segment.end());
            }
            order = std::move(out);
            return;
        }
    }
}

std::vector<Move> enumerate_moves(NeighborhoodKind kind, std::size_t n) {
    std::vector<Move> moves;
    for_each_move(kind, n, [&](const Move& m) {
        moves.push_back(m);
        return true;
    });
    return moves;
}

Move random_move(NeighborhoodKind kind, std::size_t n, std::mt19937_64& rng) {
    if (n < 4) throw std::invalid_argument("random_move needs n >= 4");
    auto uniform = [&rng](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    switch (kind) {
        case NeighborhoodKind::adjacent_swap:
            return Move{kind, uniform(0, n - 1), 0, 1, false};
        case NeighborhoodKind::two_opt: {
            std::size_t i = uniform(1, n - 1);
            std::size_t j = uniform(1, n - 2);
            if (j >= i) ++j;
            if (i > j) std::swap(i, j);
            return Move{kind, i, j, 1, false};
        }
        case NeighborhoodKind::or_opt: {
            const std::size_t len = uniform(1, max_segment(n));
            const std::size_t i = uniform(0, n - 1);
            const std::size_t off = uniform(len, n - 2);
            const bool rev = len > 1 && uniform(0, 1) == 1;
            return Move{kind, i, (i + off) % n, len, rev};
        }
    }
    return {};
}

double acceptance_probability(double delta, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    if (delta <= 0.0) return 1.0;
    return std::exp(-delta / temperature);
}

void AnnealSchedule::validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("T0 must be positive and finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

double AnnealSchedule::temperature(std::uint64_t step) const {
    return t0 * std::pow(alpha, static_cast<double>(step));
}

LocalSearchResult hill_climb(const Tour& seed, const DistanceMatrix& d, NeighborhoodKind neighborhood,
                             const Budget& budget) {
    budget.validate();
    LocalSearchResult result;
    result.tour = checked_seed(seed, d);
    BudgetClock clock(budget);
    result.trace.record(0.0, result.tour.length_m);

    auto cost = [&d](std::size_t a, std::size_t b) { return d(a, b); };
    while (!clock.exhausted()) {
        clock.tick();
        const ScanResult best = best_move(result.tour.order, neighborhood, cost);
        if (!(best.delta < -kImprovementTolerance * result.tour.length_m)) {
            result.converged = true;
            break;
        }
        apply_move(result.tour.order, best.move);
        result.tour.length_m = tour_length(result.tour.order, d);
        result.trace.record(clock.elapsed_ms(), result.tour.length_m);
    }
    result.iterations = clock.iterations();
    return result;
}

LocalSearchResult simulated_annealing(const Tour& seed, const DistanceMatrix& d, const AnnealOptions& options,
                                      std::uint64_t rng_seed, const Budget& budget) {
    options.schedule.validate();
    budget.validate();
    LocalSearchResult result;
    result.tour = checked_seed(seed, d);
    result.trace.record(0.0, result.tour.length_m);
    const std::size_t n = d.size();
    if (n < 4) {
        result.converged = true;
        return result;
    }

    const double scale = options.cost_scaled ? result.tour.length_m : 1.0;
    const double frozen_below = 1e-14 * std::max(result.tour.length_m, 1.0);
    const std::uint64_t frozen_check_every = std::max<std::uint64_t>(64, n * n / 2);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto cost = [&d](std::size_t a, std::size_t b) { return d(a, b); };

    std::vector<std::size_t> current = result.tour.order;
    double current_len = result.tour.length_m;
    BudgetClock clock(budget);
    std::uint64_t frozen_steps = 0;
    for (std::uint64_t step = 0; !clock.exhausted(); ++step) {
        clock.tick();
        const double temperature = scale * options.schedule.temperature(step);
        const Move move = random_move(options.neighborhood, n, rng);
        const double delta = move_delta(current, move, cost);
        // The schedule underflows to 0 on long runs; that is a zero-temperature walk.
        const bool accept =
            delta <= 0.0 || (temperature > 0.0 && unit(rng) < acceptance_probability(delta, temperature));
        if (accept) {
            apply_move(current, move);
            current_len += delta;
            if (current_len < result.tour.length_m * (1.0 - kImprovementTolerance)) {
                current_len = tour_length(current, d);
                if (current_len < result.tour.length_m) {
                    result.tour = Tour{current, current_len};
                    result.trace.record(clock.elapsed_ms(), current_len);
                }
            }
        }
        if (temperature < frozen_below && ++frozen_steps % frozen_check_every == 0) {
            const ScanResult best = best_move(current, options.neighborhood, cost);
            if (!(best.delta < -kImprovementTolerance * current_len)) {
                result.converged = true;
                break;
            }
        }
    }
    result.iterations = clock.iterations();
    return result;
}

void TabuList::add(std::size_t a, std::size_t b, std::uint64_t expires_at) {
    expiry_[a * n_ + b] = expires_at;
    expiry_[b * n_ + a] = expires_at;
    entries_.push_back({a, b, expires_at});
}

void TabuList::prune(std::uint64_t iteration) {
    while (head_ < entries_.size() && entries_[head_].expires_at <= iteration) {
        const Entry& e = entries_[head_];
        // A later add of the same edge may have extended its expiry.
        if (expiry_[e.a * n_ + e.b] == e.expires_at) {
            expiry_[e.a * n_ + e.b] = 0;
            expiry_[e.b * n_ + e.a] = 0;
        }
        ++head_;
    }
    if (head_ > 1024 && head_ * 2 > entries_.size()) {
        entries_.erase(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
    }
}

std::size_t default_tenure(std::size_t n) { return std::max<std::size_t>(10, n / 4); }

LocalSearchResult tabu_search(const Tour& seed, const DistanceMatrix& d, const TabuOptions& options,
                              std::uint64_t /*rng_seed*/, const Budget& budget) {
    const std::size_t tenure = options.tenure ? options.tenure : default_tenure(d.size());
    require_bounded(budget, "tabu_search");
    LocalSearchResult result;
    result.tour = checked_seed(seed, d);
    result.trace.record(0.0, result.tour.length_m);
    const std::size_t n = d.size();
    if (n < 4) {
        result.converged = true;
        return result;
    }

    TabuList tabu(n);
    std::vector<std::size_t> current = result.tour.order;
    double current_len = result.tour.length_m;
    BudgetClock clock(budget);
    while (!clock.exhausted()) {
        clock.tick();
        const std::uint64_t it = clock.iterations();
        tabu.prune(it);
        const double aspiration_level = result.tour.length_m * (1.0 - kImprovementTolerance);

        ScanResult chosen;
        for_each_move(NeighborhoodKind::two_opt, n, [&](const Move& m) {
            const std::size_t a = current[m.i - 1], b = current[m.i], c = current[m.j], e = current[(m.j + 1) % n];
            if (a == e) return true;
            const double delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
            if (!(delta < chosen.delta)) return true;
            const bool forbidden = tabu.is_tabu(a, c, it) || tabu.is_tabu(b, e, it);
            if (forbidden && !(options.aspiration && current_len + delta < aspiration_level)) return true;
            chosen.delta = delta;
            chosen.move = m;
            return true;
        });
        if (!std::isfinite(chosen.delta)) {
            result.converged = true;
            break;
        }

        const Move& m = chosen.move;
        const std::size_t a = current[m.i - 1], b = current[m.i], c = current[m.j], e = current[(m.j + 1) % n];
        tabu.add(a, b, it + tenure);
        tabu.add(c, e, it + tenure);
        apply_move(current, m);
        current_len = tour_length(current, d);
        if (current_len < aspiration_level) {
            result.tour = Tour{current, current_len};
            result.trace.record(clock.elapsed_ms(), current_len);
        }
    }
    result.iterations = clock.iterations();
    return result;
}

std::uint64_t PenaltyTable::tour_penalty(const std::vector<std::size_t>& order) const noexcept {
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < order.size(); ++k) total += (*this)(order[k], order[(k + 1) % order.size()]);
    return total;
}

std::vector<std::pair<std::size_t, std::size_t>> PenaltyTable::penalize_max_utility(
    const std::vector<std::size_t>& order, const DistanceMatrix& d) {
    const std::size_t n = order.size();
    double best = -1.0;
    std::vector<std::pair<std::size_t, std::size_t>> picked;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = order[k], b = order[(k + 1) % n];
        const double utility = d(a, b) / (1.0 + (*this)(a, b));
        if (utility > best) {
            best = utility;
            picked.clear();
        }
        if (utility == best) picked.emplace_back(a, b);
    }
    for (const auto& [a, b] : picked) increment(a, b);
    return picked;
}

LocalSearchResult guided_local_search(const Tour& seed, const DistanceMatrix& d, const GlsOptions& options,
                                      std::uint64_t /*rng_seed*/, const Budget& budget) {
    if (!(options.lambda_factor > 0.0) || !std::isfinite(options.lambda_factor))
        throw std::invalid_argument("lambda_factor must be positive");
    require_bounded(budget, "guided_local_search");
    LocalSearchResult result;
    result.tour = checked_seed(seed, d);
    result.trace.record(0.0, result.tour.length_m);
    const std::size_t n = d.size();
    if (n < 4) {
        result.converged = true;
        return result;
    }

    const double lambda = options.lambda_factor * result.tour.length_m / static_cast<double>(n);
    PenaltyTable penalties(n);
    auto augmented = [&](std::size_t a, std::size_t b) { return d(a, b) + lambda * penalties(a, b); };

    std::vector<std::size_t> current = result.tour.order;
    double current_len = result.tour.length_m;
    BudgetClock clock(budget);
    while (!clock.exhausted()) {
        clock.tick();
        const double augmented_len = current_len + lambda * static_cast<double>(penalties.tour_penalty(current));
        const ScanResult best = best_move(current, NeighborhoodKind::two_opt, augmented);
        if (best.delta < -kImprovementTolerance * augmented_len) {
            apply_move(current, best.move);
            current_len = tour_length(current, d);
            if (current_len < result.tour.length_m * (1.0 - kImprovementTolerance)) {
                result.tour = Tour{current, current_len};
                result.trace.record(clock.elapsed_ms(), current_len);
            }
        } else {
            penalties.penalize_max_utility(current, d);
        }
    }
    result.iterations = clock.iterations();
    return result;
}

}  // namespace wtsp
