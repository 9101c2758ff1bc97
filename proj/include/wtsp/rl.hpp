#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "wtsp/core.hpp"

namespace wtsp {

enum class EpsilonDecay { per_step, per_episode };
enum class RewardMode { negative_distance, inverse_distance };

/// Hyperparameters for tabular Q-learning. Defaults are the tuned values for
/// the waypoint datasets; `episodes == 0` means 100 * n.
struct RlConfig {
    double alpha = 0.01;
    double gamma = 0.95;
    double epsilon = 0.99;
    double epsilon_min = 0.01;
    double epsilon_decay = 0.995;
    std::size_t episodes = 0;
    EpsilonDecay decay = EpsilonDecay::per_step;
    RewardMode reward = RewardMode::negative_distance;
    /// Wall-clock cap; training stops after the episode in which it expires.
    std::optional<double> time_budget_ms;

    void validate() const;
    [[nodiscard]] std::size_t episodes_for(std::size_t n) const { return episodes ? episodes : 100 * n; }
};

/// n x n action values, q(s, a) = value of moving from city s to city a.
class QTable {
public:
    explicit QTable(std::size_t n) : n_(n), q_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double& operator()(std::size_t s, std::size_t a) noexcept { return q_[s * n_ + a]; }
    [[nodiscard]] double operator()(std::size_t s, std::size_t a) const noexcept { return q_[s * n_ + a]; }
    [[nodiscard]] std::span<const double> row(std::size_t s) const noexcept { return {q_.data() + s * n_, n_}; }
    [[nodiscard]] bool all_zero() const noexcept;

private:
    std::size_t n_;
    std::vector<double> q_;
};

/// Cities already visited in the current episode.
using VisitMask = std::vector<bool>;

struct EpisodeRecord {
    std::size_t episode = 0;
    double total_reward = 0.0;
    double tour_len_m = 0.0;
    double epsilon = 0.0;
};

struct EpisodeLog {
    std::vector<EpisodeRecord> records;

    /// CSV with header `episode,reward,tour_len_m,epsilon`.
    void write_csv(std::ostream& out) const;
};

struct RlResult {
    Tour tour;
    EpisodeLog log;
    /// Shortest tour seen during training and the final greedy rollout.
    Tour best_episode_tour;
    Tour greedy_tour;
    /// Best episode length over wall-clock time.
    SolveTrace trace;
};

/// Reward for travelling `distance_m`: its negation.
[[nodiscard]] double reward(double distance_m);
[[nodiscard]] double reward(double distance_m, RewardMode mode);

/// Bootstrap value of `s_next` given the cities visited so far (s_next
/// included): the best unvisited action, else the value of returning to
/// `start`, else zero once the tour is closed.
[[nodiscard]] double next_state_value(const QTable& q, std::size_t s_next, const VisitMask& visited,
                                      std::size_t start);

/// q(s,a) <- (1 - alpha) q(s,a) + alpha (r + gamma * next_state_value). Returns
/// the new entry.
double q_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, const VisitMask& visited,
                std::size_t start, double alpha, double gamma);

enum class QSide { a, b };

/// Double Q-learning step. The side chosen by `coin` picks the greedy next
/// action with its own table and values it with the other table. Returns the
/// updated entry.
double double_q_update(QTable& qa, QTable& qb, std::size_t s, std::size_t a, double r, std::size_t s_next,
                       const VisitMask& visited, std::size_t start, double alpha, double gamma, QSide coin);

/// Argmax over unvisited actions with probability 1 - epsilon (ties to the
/// lowest index), else a uniformly random unvisited action.
[[nodiscard]] std::size_t epsilon_greedy(std::span<const double> q_row, const VisitMask& visited, double epsilon,
                                         std::mt19937_64& rng);

[[nodiscard]] RlResult train_q(const DistanceMatrix& d, const RlConfig& config, std::size_t start,
                               std::uint64_t rng_seed);
[[nodiscard]] RlResult train_double_q(const DistanceMatrix& d, const RlConfig& config, std::size_t start,
                                      std::uint64_t rng_seed);

}  // namespace wtsp
