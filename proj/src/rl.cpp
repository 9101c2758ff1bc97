#include "wtsp/rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wtsp/budget.hpp"

namespace wtsp {
namespace {

void check_index(std::size_t v, std::size_t n, const char* what) {
    if (v >= n) throw std::out_of_range(std::string(what) + " index " + std::to_string(v) + " out of range");
}

// Greedy action over unvisited cities, ties to the lowest index; n when none.
std::size_t argmax_unvisited(std::span<const double> row, const VisitMask& visited) {
    std::size_t best = row.size();
    for (std::size_t a = 0; a < row.size(); ++a)
        if (!visited[a] && (best == row.size() || row[a] > row[best])) best = a;
    return best;
}

// Action a greedy agent takes from s_next: the best unvisited city, the
// return to start once all are visited, or none after the tour is closed.
std::optional<std::size_t> bootstrap_action(std::span<const double> row, std::size_t s_next,
                                            const VisitMask& visited, std::size_t start) {
    const std::size_t a = argmax_unvisited(row, visited);
    if (a != row.size()) return a;
    if (s_next != start) return start;
    return std::nullopt;
}

class Trainer {
public:
    Trainer(const DistanceMatrix& d, const RlConfig& config, std::size_t start, std::uint64_t rng_seed, bool dual)
        : d_(d), config_(config), start_(start), rng_(rng_seed), dual_(dual), qa_(d.size()), qb_(dual ? d.size() : 0) {
        config_.validate();
        if (d.size() < 3) throw std::invalid_argument("Q-learning needs n >= 3");
        check_index(start, d.size(), "start");
    }

    RlResult run() {
        const std::size_t n = d_.size();
        const std::size_t episodes = config_.episodes_for(n);
        Stopwatch watch;
        RlResult result;
        double epsilon = config_.epsilon;
        std::vector<double> row(n);
        VisitMask visited(n);
        std::vector<std::size_t> order;
        order.reserve(n);
        bool have_best = false;

        for (std::size_t ep = 0; ep < episodes; ++ep) {
            if (config_.time_budget_ms && watch.elapsed_ms() >= *config_.time_budget_ms) {
                if (ep == 0) throw BudgetExhausted("time budget expired before the first episode completed");
                break;
            }
            std::fill(visited.begin(), visited.end(), false);
            visited[start_] = true;
            order.assign(1, start_);
            double total = 0.0;
            std::size_t s = start_;
            while (order.size() < n) {
                policy_row(s, row);
                const std::size_t a = epsilon_greedy(row, visited, epsilon, rng_);
                const double r = reward(d_(s, a), config_.reward);
                visited[a] = true;
                order.push_back(a);
                update(s, a, r, a, visited);
                total += r;
                s = a;
                if (config_.decay == EpsilonDecay::per_step) epsilon = decayed(epsilon);
            }
            const double r_close = reward(d_(s, start_), config_.reward);
            update(s, start_, r_close, start_, visited);
            total += r_close;
            if (config_.decay == EpsilonDecay::per_step) epsilon = decayed(epsilon);
            if (config_.decay == EpsilonDecay::per_episode) epsilon = decayed(epsilon);

            const double len = tour_length(order, d_);
            result.log.records.push_back({ep, total, len, epsilon});
            if (!have_best || len < result.best_episode_tour.length_m) {
                result.best_episode_tour = Tour{order, len};
                result.trace.record(watch.elapsed_ms(), len);
                have_best = true;
            }
        }

        result.greedy_tour = greedy_rollout();
        if (result.greedy_tour.length_m < result.best_episode_tour.length_m)
            result.trace.record(watch.elapsed_ms(), result.greedy_tour.length_m);
        result.tour = result.greedy_tour.length_m < result.best_episode_tour.length_m ? result.greedy_tour
                                                                                     : result.best_episode_tour;
        return result;
    }

private:
    double decayed(double epsilon) const {
        if (epsilon > config_.epsilon_min) epsilon *= config_.epsilon_decay;
        return std::max(epsilon, config_.epsilon_min);
    }

    void policy_row(std::size_t s, std::vector<double>& row) const {
        const auto a = qa_.row(s);
        if (!dual_) {
            std::copy(a.begin(), a.end(), row.begin());
            return;
        }
        const auto b = qb_.row(s);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = a[k] + b[k];
    }

    void update(std::size_t s, std::size_t a, double r, std::size_t s_next, const VisitMask& visited) {
        if (!dual_) {
            q_update(qa_, s, a, r, s_next, visited, start_, config_.alpha, config_.gamma);
            return;
        }
        const QSide side = coin_(rng_) ? QSide::a : QSide::b;
        double_q_update(qa_, qb_, s, a, r, s_next, visited, start_, config_.alpha, config_.gamma, side);
    }

    Tour greedy_rollout() const {
        const std::size_t n = d_.size();
        std::vector<double> row(n);
        VisitMask visited(n, false);
        visited[start_] = true;
        std::vector<std::size_t> order{start_};
        std::size_t s = start_;
        while (order.size() < n) {
            policy_row(s, row);
            s = argmax_unvisited(row, visited);
            visited[s] = true;
            order.push_back(s);
        }
        return Tour::from_order(std::move(order), d_);
    }

    const DistanceMatrix& d_;
    RlConfig config_;
    std::size_t start_;
    std::mt19937_64 rng_;
    std::bernoulli_distribution coin_{0.5};
    bool dual_;
    QTable qa_;
    QTable qb_;
};

}  // namespace

void RlConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) throw std::invalid_argument("epsilon_min must lie in [0, 1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0))
        throw std::invalid_argument("epsilon_decay must lie in (0, 1)");
    if (time_budget_ms && !(*time_budget_ms > 0.0)) throw std::invalid_argument("time budget must be positive");
}

bool QTable::all_zero() const noexcept {
    return std::all_of(q_.begin(), q_.end(), [](double v) { return v == 0.0; });
}

void EpisodeLog::write_csv(std::ostream& out) const {
    out << "episode,reward,tour_len_m,epsilon\n";
    out.precision(17);
    for (const auto& r : records)
        out << r.episode << ',' << r.total_reward << ',' << r.tour_len_m << ',' << r.epsilon << '\n';
}

double reward(double distance_m) {
    if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
    return -distance_m;
}

double reward(double distance_m, RewardMode mode) {
    if (mode == RewardMode::negative_distance) return reward(distance_m);
    if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
    return 1.0 / std::max(distance_m, 1e-9);
}

double next_state_value(const QTable& q, std::size_t s_next, const VisitMask& visited, std::size_t start) {
    const auto a = bootstrap_action(q.row(s_next), s_next, visited, start);
    return a ? q(s_next, *a) : 0.0;
}

double q_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, const VisitMask& visited,
                std::size_t start, double alpha, double gamma) {
    const std::size_t n = q.size();
    check_index(s, n, "state");
    check_index(a, n, "action");
    check_index(s_next, n, "next state");
    check_index(start, n, "start");
    if (visited.size() != n) throw std::invalid_argument("visit mask size mismatch");
    const double target = r + gamma * next_state_value(q, s_next, visited, start);
    q(s, a) = (1.0 - alpha) * q(s, a) + alpha * target;
    return q(s, a);
}

double double_q_update(QTable& qa, QTable& qb, std::size_t s, std::size_t a, double r, std::size_t s_next,
                       const VisitMask& visited, std::size_t start, double alpha, double gamma, QSide coin) {
    const std::size_t n = qa.size();
    if (qb.size() != n) throw std::invalid_argument("Q tables differ in size");
    check_index(s, n, "state");
    check_index(a, n, "action");
    check_index(s_next, n, "next state");
    check_index(start, n, "start");
    if (visited.size() != n) throw std::invalid_argument("visit mask size mismatch");
    QTable& chooser = coin == QSide::a ? qa : qb;
    const QTable& valuer = coin == QSide::a ? qb : qa;
    const auto next = bootstrap_action(chooser.row(s_next), s_next, visited, start);
    const double future = next ? valuer(s_next, *next) : 0.0;
    chooser(s, a) += alpha * (r + gamma * future - chooser(s, a));
    return chooser(s, a);
}

std::size_t epsilon_greedy(std::span<const double> q_row, const VisitMask& visited, double epsilon,
                           std::mt19937_64& rng) {
    if (visited.size() != q_row.size()) throw std::invalid_argument("visit mask size mismatch");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    const std::size_t open = static_cast<std::size_t>(std::count(visited.begin(), visited.end(), false));
    if (open == 0) throw std::invalid_argument("epsilon_greedy: no unvisited action");
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u >= epsilon) return argmax_unvisited(q_row, visited);
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, open - 1)(rng);
    for (std::size_t a = 0; a < visited.size(); ++a)
        if (!visited[a] && k-- == 0) return a;
    return argmax_unvisited(q_row, visited);
}

RlResult train_q(const DistanceMatrix& d, const RlConfig& config, std::size_t start, std::uint64_t rng_seed) {
    return Trainer(d, config, start, rng_seed, false).run();
}

RlResult train_double_q(const DistanceMatrix& d, const RlConfig& config, std::size_t start,
                        std::uint64_t rng_seed) {
    return Trainer(d, config, start, rng_seed, true).run();
}

}  // namespace wtsp
