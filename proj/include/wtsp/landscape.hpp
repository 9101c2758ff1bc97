#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wtsp::landscape {

enum class Kind { single_peak, multi_peak };

[[nodiscard]] std::string to_string(Kind kind);
[[nodiscard]] Kind parse_kind(const std::string& name);

inline constexpr double kStep = 0.05;
/// Grid indices run over [-kMaxIndex, kMaxIndex] on both axes, i.e. [-1, 1].
inline constexpr int kMaxIndex = 20;

/// Lattice position; the coordinate on each axis is index * kStep.
struct GridPos {
    int i = 0;
    int j = 0;

    [[nodiscard]] double x1() const noexcept { return i * kStep; }
    [[nodiscard]] double x2() const noexcept { return j * kStep; }
    [[nodiscard]] bool in_domain() const noexcept;
    friend bool operator==(const GridPos&, const GridPos&) = default;
};

/// Nearest lattice position to (x1, x2). Throws std::out_of_range outside
/// [-1, 1]^2.
[[nodiscard]] GridPos snap(double x1, double x2);
/// The lattice position exactly at (x1, x2) up to `tol`, if any.
[[nodiscard]] std::optional<GridPos> on_grid(double x1, double x2, double tol = 1e-9);

/// -(x1^2 + x2^2).
[[nodiscard]] double objective_single(double x1, double x2);
/// -(0.2 + x1^2 + x2^2 - 0.1 cos(6 pi x1) - 0.1 cos(6 pi x2)).
[[nodiscard]] double objective_multi(double x1, double x2);
[[nodiscard]] double objective(Kind kind, double x1, double x2);
[[nodiscard]] double objective(Kind kind, GridPos p);

enum class Direction { N, S, E, W, NE, NW, SE, SW };

/// Moves in tie-breaking order.
inline constexpr std::array<Direction, 8> kDirections{Direction::N,  Direction::S,  Direction::E,  Direction::W,
                                                       Direction::NE, Direction::NW, Direction::SE, Direction::SW};

[[nodiscard]] GridPos step(GridPos p, Direction d) noexcept;
/// Moves that keep the agent inside the domain, in kDirections order.
[[nodiscard]] std::vector<GridPos> admissible_moves(GridPos p);

struct WalkRecord {
    std::uint64_t iteration = 0;
    GridPos pos;
    double objective = 0.0;
    /// SA only.
    std::optional<double> temperature;
    /// SA only, absent on the starting record: objective decrease of the
    /// proposal, its acceptance probability and whether it was taken.
    std::optional<double> delta;
    std::optional<double> acceptance_prob;
    bool accepted = false;
};

struct WalkTrace {
    Kind kind = Kind::single_peak;
    std::vector<WalkRecord> records;

    [[nodiscard]] const WalkRecord& final() const { return records.back(); }
    /// Moves taken.
    [[nodiscard]] std::size_t steps() const;
    [[nodiscard]] double best_objective() const;

    /// Header `iteration,x1,x2,objective,temperature,acceptance_prob`; SA
    /// columns are empty for hill climbing.
    void write_csv(std::ostream& out) const;
};

inline constexpr std::uint64_t kDefaultMaxIters = 5000;

/// Steepest ascent: each iteration takes the best strictly improving
/// admissible move, first in kDirections order on ties.
[[nodiscard]] WalkTrace hc_walk(Kind kind, GridPos start, std::uint64_t max_iters = kDefaultMaxIters);

struct SaParams {
    double t0 = 1.0;
    double alpha = 0.99;

    void validate() const;
};

/// Record k >= 1 proposes one uniformly drawn admissible move at temperature
/// alpha^k * t0; record 0 is the start at t0.
[[nodiscard]] WalkTrace sa_walk(Kind kind, GridPos start, const SaParams& params, std::uint64_t rng_seed,
                                std::uint64_t max_iters = kDefaultMaxIters);

struct Series {
    std::string name;
    std::vector<double> values;
};

/// Line chart over iteration index, one polyline per series.
void write_svg_chart(std::ostream& out, const std::string& title, const std::string& y_label,
                     const std::vector<Series>& series);

}  // namespace wtsp::landscape
