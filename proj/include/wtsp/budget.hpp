#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace wtsp {

/// Stopping rule for anytime solvers. Either bound may be absent; iteration
/// bounds give bitwise-reproducible runs, wall-clock bounds do not.
struct Budget {
    std::optional<std::uint64_t> max_iterations;
    std::optional<double> max_ms;

    static Budget iterations(std::uint64_t n) { return {n, std::nullopt}; }
    static Budget millis(double ms) { return {std::nullopt, ms}; }
    static Budget unbounded() { return {}; }

    [[nodiscard]] bool bounded() const noexcept { return max_iterations || max_ms; }

    void validate() const {
        if (max_iterations && *max_iterations == 0)
            throw std::invalid_argument("iteration budget must be positive");
        if (max_ms && !(*max_ms > 0.0))
            throw std::invalid_argument("time budget must be positive");
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    [[nodiscard]] double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Tracks a Budget against a running clock and an iteration counter.
class BudgetClock {
public:
    explicit BudgetClock(const Budget& budget) : budget_(budget) {}

    /// True once either bound is reached. Counts nothing by itself.
    [[nodiscard]] bool exhausted() const {
        if (budget_.max_iterations && iterations_ >= *budget_.max_iterations) return true;
        if (budget_.max_ms && watch_.elapsed_ms() >= *budget_.max_ms) return true;
        return false;
    }

    void tick() noexcept { ++iterations_; }
    [[nodiscard]] std::uint64_t iterations() const noexcept { return iterations_; }
    [[nodiscard]] double elapsed_ms() const { return watch_.elapsed_ms(); }

private:
    Budget budget_;
    Stopwatch watch_;
    std::uint64_t iterations_ = 0;
};

}  // namespace wtsp
