#include "wtsp/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "wtsp/localsearch.hpp"

namespace wtsp::landscape {
namespace {

void check_domain(double x1, double x2) {
    constexpr double lim = 1.0 + 1e-12;
    if (!(std::abs(x1) <= lim && std::abs(x2) <= lim))
        throw std::out_of_range("position (" + std::to_string(x1) + ", " + std::to_string(x2) +
                                ") outside [-1, 1]^2");
}

void check_start(GridPos p) {
    if (!p.in_domain())
        throw std::out_of_range("start index (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                                ") outside the grid");
}

WalkRecord start_record(Kind kind, GridPos p) {
    WalkRecord r;
    r.pos = p;
    r.objective = objective(kind, p);
    return r;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_string(Kind kind) { return kind == Kind::single_peak ? "single" : "multi"; }

Kind parse_kind(const std::string& name) {
    if (name == "single" || name == "single_peak") return Kind::single_peak;
    if (name == "multi" || name == "multi_peak") return Kind::multi_peak;
    throw std::invalid_argument("unknown landscape kind '" + name + "' (expected single or multi)");
}

bool GridPos::in_domain() const noexcept { return std::abs(i) <= kMaxIndex && std::abs(j) <= kMaxIndex; }

GridPos snap(double x1, double x2) {
    check_domain(x1, x2);
    return {static_cast<int>(std::lround(x1 / kStep)), static_cast<int>(std::lround(x2 / kStep))};
}

std::optional<GridPos> on_grid(double x1, double x2, double tol) {
    if (!std::isfinite(x1) || !std::isfinite(x2)) return std::nullopt;
    if (std::abs(x1) > 1.0 + tol || std::abs(x2) > 1.0 + tol) return std::nullopt;
    const GridPos p = snap(std::clamp(x1, -1.0, 1.0), std::clamp(x2, -1.0, 1.0));
    if (std::abs(p.x1() - x1) > tol || std::abs(p.x2() - x2) > tol) return std::nullopt;
    return p;
}

double objective_single(double x1, double x2) {
    check_domain(x1, x2);
    return -(x1 * x1 + x2 * x2);
}

double objective_multi(double x1, double x2) {
    check_domain(x1, x2);
    constexpr double w = 6.0 * std::numbers::pi;
    return -(0.2 + x1 * x1 + x2 * x2 - 0.1 * std::cos(w * x1) - 0.1 * std::cos(w * x2));
}

double objective(Kind kind, double x1, double x2) {
    return kind == Kind::single_peak ? objective_single(x1, x2) : objective_multi(x1, x2);
}

double objective(Kind kind, GridPos p) { return objective(kind, p.x1(), p.x2()); }

GridPos step(GridPos p, Direction d) noexcept {
    switch (d) {
        case Direction::N: return {p.i, p.j + 1};
        case Direction::S: return {p.i, p.j - 1};
        case Direction::E: return {p.i + 1, p.j};
        case Direction::W: return {p.i - 1, p.j};
        case Direction::NE: return {p.i + 1, p.j + 1};
        case Direction::NW: return {p.i - 1, p.j + 1};
        case Direction::SE: return {p.i + 1, p.j - 1};
        case Direction::SW: return {p.i - 1, p.j - 1};
    }
    return p;
}

std::vector<GridPos> admissible_moves(GridPos p) {
    std::vector<GridPos> out;
    out.reserve(kDirections.size());
    for (Direction d : kDirections) {
        const GridPos q = step(p, d);
        if (q.in_domain()) out.push_back(q);
    }
    return out;
}

std::size_t WalkTrace::steps() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const WalkRecord& r) {
        return r.accepted;
    }));
}

double WalkTrace::best_objective() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) best = std::max(best, r.objective);
    return best;
}

void WalkTrace::write_csv(std::ostream& out) const {
    out << "iteration,x1,x2,objective,temperature,acceptance_prob\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.iteration << ',' << r.pos.x1() << ',' << r.pos.x2() << ',' << r.objective << ',';
        if (r.temperature) out << *r.temperature;
        out << ',';
        if (r.acceptance_prob) out << *r.acceptance_prob;
        out << '\n';
    }
}

WalkTrace hc_walk(Kind kind, GridPos start, std::uint64_t max_iters) {
    check_start(start);
    WalkTrace trace{kind, {start_record(kind, start)}};
    GridPos cur = start;
    double cur_obj = trace.records.back().objective;
    for (std::uint64_t k = 1; k <= max_iters; ++k) {
        std::optional<GridPos> best;
        double best_obj = cur_obj;
        for (const GridPos q : admissible_moves(cur)) {
            const double v = objective(kind, q);
            if (v > best_obj) {
                best = q;
                best_obj = v;
            }
        }
        if (!best) break;
        cur = *best;
        cur_obj = best_obj;
        WalkRecord r;
        r.iteration = k;
        r.pos = cur;
        r.objective = cur_obj;
        r.accepted = true;
        trace.records.push_back(r);
    }
    return trace;
}

void SaParams::validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("T0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

WalkTrace sa_walk(Kind kind, GridPos start, const SaParams& params, std::uint64_t rng_seed,
                  std::uint64_t max_iters) {
    params.validate();
    check_start(start);
    WalkTrace trace{kind, {start_record(kind, start)}};
    trace.records.back().temperature = params.t0;
    const AnnealSchedule schedule{params.t0, params.alpha};
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GridPos cur = start;
    double cur_obj = trace.records.back().objective;
    for (std::uint64_t k = 1; k <= max_iters; ++k) {
        const double t = schedule.temperature(k);
        const auto moves = admissible_moves(cur);
        const GridPos q = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
        const double q_obj = objective(kind, q);
        const double delta = cur_obj - q_obj;
        const double p = t > 0.0 ? acceptance_probability(delta, t) : (delta <= 0.0 ? 1.0 : 0.0);
        const bool take = delta <= 0.0 || unit(rng) < p;
        if (take) {
            cur = q;
            cur_obj = q_obj;
        }
        WalkRecord r;
        r.iteration = k;
        r.pos = cur;
        r.objective = cur_obj;
        r.temperature = t;
        r.delta = delta;
        r.acceptance_prob = p;
        r.accepted = take;
        trace.records.push_back(r);
    }
    return trace;
}

void write_svg_chart(std::ostream& out, const std::string& title, const std::string& y_label,
                     const std::vector<Series>& series) {
    constexpr double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::size_t count = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series) {
        count = std::max(count, s.values.size());
        for (double v : s.values) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](std::size_t k) { return left + (count > 1 ? pw * static_cast<double>(k) / (count - 1) : 0.0); };
    auto py = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << xml_escape(title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration</text>\n";
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(y_label)
        << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << hi << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + ph << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"10\">" << lo << "</text>\n";
    out << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 14 << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"10\">" << (count ? count - 1 : 0) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].values.size(); ++k) {
            const double v = series[s].values[k];
            if (!std::isfinite(v)) continue;
            out << px(k) << ',' << py(v) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << left + pw - 4 << "\" y=\"" << top + 14 + 14 * static_cast<double>(s)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
            << xml_escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace wtsp::landscape
