#include "wtsp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wtsp::bench {
namespace {

using nlohmann::json;

std::string g17(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return {buf, static_cast<std::size_t>(len)};
}

std::string fixed(double v, int digits) {
    if (!std::isfinite(v)) return "-";
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return {buf, static_cast<std::size_t>(len)};
}

std::string file_safe(std::string s) {
    for (char& c : s)
        if (c == ':' || c == '/' || c == '\\') c = '-';
    return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Job {
    std::size_t size_index;
    std::string method;
    std::size_t repeat;
    std::uint64_t seed;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

double to_double(const std::string& s, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad number '" + s + "'", line);
    return v;
}

std::size_t to_size(const std::string& s, std::size_t line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad count '" + s + "'", line);
    return v;
}

constexpr const char* kReportHeader =
    "method,size,runs,failures,mean_len_m,min_len_m,std_len_m,var_len_m,mean_time_ms,std_time_ms,var_time_ms,"
    "gap_pct";

}  // namespace

void SuiteConfig::validate() const {
    if (methods.empty()) throw std::invalid_argument("suite needs at least one method");
    if (sizes.empty()) throw std::invalid_argument("suite needs at least one size");
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    for (std::size_t n : sizes)
        if (n < 2) throw std::invalid_argument("dataset sizes must be >= 2");
    for (const auto& m : methods) (void)require_method(m);
    for (const auto& [id, p] : params) (void)resolve_params(require_method(id), p);
    budget.validate();
}

DatasetProvider synthetic_datasets(std::uint64_t seed, BoundingBox bbox) {
    bbox.validate();
    return [seed, bbox](std::size_t n) { return generate_dataset(n, bbox, seed + n); };
}

Stats population_stats(std::span<const double> values) {
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan};
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(v.size());
    return {mean, std::sqrt(var), var};
}

SuiteReport aggregate(std::vector<RunRecord> runs, const std::vector<std::string>& method_order) {
    auto method_rank = [&](const std::string& m) {
        const auto it = std::find(method_order.begin(), method_order.end(), m);
        return static_cast<std::size_t>(it - method_order.begin());
    };
    std::stable_sort(runs.begin(), runs.end(), [&](const RunRecord& a, const RunRecord& b) {
        const auto ka = std::make_tuple(a.result.size, method_rank(a.result.method), a.result.method, a.repeat);
        const auto kb = std::make_tuple(b.result.size, method_rank(b.result.method), b.result.method, b.repeat);
        return ka < kb;
    });

    SuiteReport report;
    for (std::size_t i = 0; i < runs.size();) {
        std::size_t j = i;
        while (j < runs.size() && runs[j].result.size == runs[i].result.size &&
               runs[j].result.method == runs[i].result.method)
            ++j;
        CohortRow row;
        row.method = runs[i].result.method;
        row.size = runs[i].result.size;
        std::vector<double> lens, times;
        for (std::size_t k = i; k < j; ++k) {
            ++row.runs;
            if (runs[k].error) {
                ++row.failures;
                continue;
            }
            lens.push_back(runs[k].result.tour_len_m);
            times.push_back(runs[k].result.elapsed_ms);
        }
        const Stats ls = population_stats(lens), ts = population_stats(times);
        row.mean_len_m = ls.mean;
        row.std_len_m = ls.std;
        row.var_len_m = ls.var;
        row.min_len_m = lens.empty() ? ls.mean : *std::min_element(lens.begin(), lens.end());
        row.mean_time_ms = ts.mean;
        row.std_time_ms = ts.std;
        row.var_time_ms = ts.var;
        report.rows.push_back(row);
        i = j;
    }

    std::map<std::size_t, double> best;
    for (const auto& r : report.rows) {
        if (!std::isfinite(r.mean_len_m)) continue;
        auto [it, fresh] = best.emplace(r.size, r.mean_len_m);
        if (!fresh) it->second = std::min(it->second, r.mean_len_m);
    }
    for (auto& r : report.rows) {
        const auto it = best.find(r.size);
        r.gap_pct = std::isfinite(r.mean_len_m) && it != best.end() && it->second > 0.0
                        ? gap_to_best(r.mean_len_m, it->second)
                        : std::numeric_limits<double>::quiet_NaN();
    }
    for (auto& run : runs) {
        const auto it = best.find(run.result.size);
        if (!run.error && it != best.end() && it->second > 0.0)
            run.result.gap_pct = gap_to_best(run.result.tour_len_m, it->second);
    }
    report.runs = std::move(runs);
    return report;
}

SuiteReport run_suite(const SuiteConfig& config, const DatasetProvider& datasets, const SolveFn& solve_fn) {
    config.validate();
    std::vector<std::string> methods;
    for (const auto& m : config.methods) {
        const std::string id = require_method(m).id;
        if (std::find(methods.begin(), methods.end(), id) == methods.end()) methods.push_back(id);
    }
    std::map<std::string, nlohmann::json> params;
    for (const auto& [name, p] : config.params) params[require_method(name).id] = p;

    std::vector<DistanceMatrix> matrices;
    for (std::size_t n : config.sizes) {
        const WaypointSet points = datasets(n);
        if (points.size() != n)
            throw std::runtime_error("dataset provider returned " + std::to_string(points.size()) +
                                     " points for size " + std::to_string(n));
        if (config.start >= n) throw std::invalid_argument("start index exceeds dataset size");
        matrices.push_back(build_distance_matrix(points));
    }

    std::vector<Job> jobs;
    for (std::size_t s = 0; s < config.sizes.size(); ++s)
        for (const auto& m : methods) {
            const std::size_t count = require_method(m).stochastic ? config.repeats : 1;
            for (std::size_t k = 0; k < count; ++k) jobs.push_back({s, m, k, config.seed + k});
        }

    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            RunRecord& rec = records[i];
            rec.repeat = job.repeat;
            rec.result.method = job.method;
            rec.result.size = config.sizes[job.size_index];
            rec.result.seed = job.seed;
            SolveRequest req;
            req.method = job.method;
            req.seed = job.seed;
            req.budget = config.budget;
            req.start = config.start;
            if (const auto it = params.find(job.method); it != params.end()) req.params = it->second;
            try {
                const SolveOutcome out = solve_fn(matrices[job.size_index], req);
                rec.result.tour_len_m = out.tour.length_m;
                rec.result.elapsed_ms = out.elapsed_ms;
                rec.result.trace = out.trace;
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
        }
    };
    const std::size_t threads = std::min(config.parallelism, std::max<std::size_t>(jobs.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SuiteReport report = aggregate(std::move(records), methods);

    if (config.out_dir) {
        std::string runs_csv = "method,size,repeat,seed,tour_len_m,elapsed_ms,gap_pct,error\n";
        for (const auto& r : report.runs) {
            runs_csv += csv_field(r.result.method) + ',' + std::to_string(r.result.size) + ',' +
                        std::to_string(r.repeat) + ',' + std::to_string(r.result.seed) + ',' +
                        (r.error ? "" : g17(r.result.tour_len_m)) + ',' + (r.error ? "" : g17(r.result.elapsed_ms)) +
                        ',' + (r.error ? "" : g17(r.result.gap_pct)) + ',' + csv_field(r.error.value_or("")) + '\n';
            if (r.result.trace) {
                const auto name = file_safe(r.result.method) + "_n" + std::to_string(r.result.size) + "_r" +
                                  std::to_string(r.repeat) + ".csv";
                write_file_atomic(*config.out_dir / "traces" / name, trace_to_csv(*r.result.trace));
            }
        }
        write_file_atomic(*config.out_dir / "runs.csv", runs_csv);
    }
    return report;
}

SolveTrace smooth_trace(const SolveTrace& trace, std::size_t window) {
    if (window == 0) throw std::invalid_argument("smoothing window must be >= 1");
    SolveTrace out;
    out.samples.reserve(trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t k = first; k <= i; ++k) sum += trace.samples[k].best_cost_m;
        out.samples.push_back({trace.samples[i].elapsed_ms, sum / static_cast<double>(i + 1 - first)});
    }
    return out;
}

std::string trace_to_csv(const SolveTrace& trace) {
    std::string out = "elapsed_ms,best_cost_m\n";
    for (const auto& s : trace.samples) out += g17(s.elapsed_ms) + ',' + g17(s.best_cost_m) + '\n';
    return out;
}

std::string report_to_csv(const SuiteReport& report) {
    std::string out = std::string(kReportHeader) + '\n';
    for (const auto& r : report.rows) {
        out += csv_field(r.method) + ',' + std::to_string(r.size) + ',' + std::to_string(r.runs) + ',' +
               std::to_string(r.failures) + ',' + g17(r.mean_len_m) + ',' + g17(r.min_len_m) + ',' +
               g17(r.std_len_m) + ',' + g17(r.var_len_m) + ',' + g17(r.mean_time_ms) + ',' + g17(r.std_time_ms) +
               ',' + g17(r.var_time_ms) + ',' + g17(r.gap_pct) + '\n';
    }
    return out;
}

SuiteReport parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    SuiteReport report;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != kReportHeader) throw ParseError("unexpected report header", line_no);
            header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 12) throw ParseError("expected 12 fields", line_no);
        CohortRow r;
        r.method = f[0];
        r.size = to_size(f[1], line_no);
        r.runs = to_size(f[2], line_no);
        r.failures = to_size(f[3], line_no);
        r.mean_len_m = to_double(f[4], line_no);
        r.min_len_m = to_double(f[5], line_no);
        r.std_len_m = to_double(f[6], line_no);
        r.var_len_m = to_double(f[7], line_no);
        r.mean_time_ms = to_double(f[8], line_no);
        r.std_time_ms = to_double(f[9], line_no);
        r.var_time_ms = to_double(f[10], line_no);
        r.gap_pct = to_double(f[11], line_no);
        report.rows.push_back(r);
    }
    if (!header) throw ParseError("empty report");
    return report;
}

std::string report_to_json(const SuiteReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"method", r.method},
                        {"size", r.size},
                        {"runs", r.runs},
                        {"failures", r.failures},
                        {"mean_len_m", number_or_null(r.mean_len_m)},
                        {"min_len_m", number_or_null(r.min_len_m)},
                        {"std_len_m", number_or_null(r.std_len_m)},
                        {"var_len_m", number_or_null(r.var_len_m)},
                        {"mean_time_ms", number_or_null(r.mean_time_ms)},
                        {"std_time_ms", number_or_null(r.std_time_ms)},
                        {"var_time_ms", number_or_null(r.var_time_ms)},
                        {"gap_pct", number_or_null(r.gap_pct)}});
    }
    json runs = json::array();
    for (const auto& r : report.runs) {
        json j{{"method", r.result.method}, {"size", r.result.size}, {"repeat", r.repeat}, {"seed", r.result.seed}};
        if (r.error) {
            j["error"] = *r.error;
        } else {
            j["tour_len_m"] = r.result.tour_len_m;
            j["elapsed_ms"] = r.result.elapsed_ms;
            j["gap_pct"] = r.result.gap_pct;
        }
        runs.push_back(j);
    }
    return json{{"statistics", "population"}, {"rows", rows}, {"runs", runs}}.dump(2) + "\n";
}

std::string report_to_markdown(const SuiteReport& report) {
    std::string out = "# Benchmark report\n\nStandard deviation and variance are population statistics. "
                      "Gap is measured against the best mean tour length for each size.\n";
    std::set<std::size_t> sizes;
    for (const auto& r : report.rows) sizes.insert(r.size);
    for (std::size_t n : sizes) {
        out += "\n## n = " + std::to_string(n) + "\n\n";
        out += "| Method | Tour Len. | Gap to best (%) | Time (s) |\n";
        out += "|---|---:|---:|---:|\n";
        for (const auto& r : report.rows) {
            if (r.size != n) continue;
            const bool best = std::isfinite(r.gap_pct) && r.gap_pct == 0.0;
            auto cell = [best](const std::string& s) { return best ? "**" + s + "**" : s; };
            out += "| " + cell(r.method) + " | " + cell(fixed(r.mean_len_m, 2)) + " | " + cell(fixed(r.gap_pct, 2)) +
                   " | " + cell(fixed(r.mean_time_ms / 1000.0, 3)) + " |\n";
        }
    }
    bool spread = false;
    for (const auto& r : report.rows) spread = spread || r.runs > 1;
    if (spread) {
        out += "\n## Spread over repeats\n\n| Method | n | Runs | std (m) | var (m^2) | Time std (s) |\n"
               "|---|---:|---:|---:|---:|---:|\n";
        for (const auto& r : report.rows) {
            if (r.runs <= 1) continue;
            out += "| " + r.method + " | " + std::to_string(r.size) + " | " + std::to_string(r.runs) + " | " +
                   fixed(r.std_len_m, 2) + " | " + fixed(r.var_len_m, 2) + " | " +
                   fixed(r.std_time_ms / 1000.0, 3) + " |\n";
        }
    }
    return out;
}

std::vector<std::filesystem::path> emit_report(const SuiteReport& report, const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats) {
    if (report.rows.empty()) throw std::invalid_argument("cannot emit an empty report");
    std::vector<std::filesystem::path> written;
    for (ReportFormat f : formats) {
        std::filesystem::path p;
        switch (f) {
            case ReportFormat::csv:
                p = dir / "report.csv";
                write_file_atomic(p, report_to_csv(report));
                break;
            case ReportFormat::json:
                p = dir / "report.json";
                write_file_atomic(p, report_to_json(report));
                break;
            case ReportFormat::markdown:
                p = dir / "report.md";
                write_file_atomic(p, report_to_markdown(report));
                break;
        }
        written.push_back(p);
    }
    return written;
}

}  // namespace wtsp::bench
