#include "wtsp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unordered_set>

#include <json.hpp>

#ifdef _WIN32
#include <process.h>
#define WTSP_GETPID _getpid
#else
#include <unistd.h>
#define WTSP_GETPID getpid
#endif

namespace wtsp {
namespace {

using nlohmann::json;

constexpr double kScale = 1e9;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

double parse_double(std::string_view s, const char* field, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ParseError("bad " + std::string(field) + " value '" + std::string(s) + "'", line);
    return v;
}

long long parse_id(std::string_view s, std::size_t line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad id '" + std::string(s) + "'", line);
    return v;
}

void check_range(CoordKind kind, double lat, double lon, std::size_t line) {
    if (kind != CoordKind::geographic) return;
    if (lat < -90.0 || lat > 90.0)
        throw ParseError("latitude " + std::to_string(lat) + " outside [-90, 90]", line);
    if (lon < -180.0 || lon > 180.0)
        throw ParseError("longitude " + std::to_string(lon) + " outside [-180, 180]", line);
}

std::string fixed9(double v) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s(buf, static_cast<std::size_t>(len));
    if (s == "-0.000000000") s.erase(0, 1);
    return s;
}

// Nearest 9-digit decimal to v that does not leave [lo, hi].
double round9_within(double v, double lo, double hi) {
    double k = std::round(v * kScale);
    if (k / kScale < lo) k += 1.0;
    if (k / kScale > hi) k -= 1.0;
    return k / kScale;
}

void check_tour(const Tour& tour, const WaypointSet& points) {
    if (tour.order.size() != points.size())
        throw std::invalid_argument("tour visits " + std::to_string(tour.order.size()) + " cities but the set has " +
                                    std::to_string(points.size()));
    validate_permutation(tour.order, points.size());
}

}  // namespace

void BoundingBox::validate() const {
    if (!std::isfinite(min_lat) || !std::isfinite(max_lat) || !std::isfinite(min_lon) || !std::isfinite(max_lon))
        throw std::invalid_argument("bounding box has a non-finite bound");
    if (!(min_lat < max_lat)) throw std::invalid_argument("bounding box needs min_lat < max_lat");
    if (!(min_lon < max_lon)) throw std::invalid_argument("bounding box needs min_lon < max_lon");
    if (kind == CoordKind::geographic) {
        if (min_lat < -90.0 || max_lat > 90.0) throw std::invalid_argument("bounding box latitude outside [-90, 90]");
        if (min_lon < -180.0 || max_lon > 180.0)
            throw std::invalid_argument("bounding box longitude outside [-180, 180]");
    }
}

bool BoundingBox::contains(const Waypoint& p) const noexcept {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
}

BoundingBox BoundingBox::around(double lat, double lon, double side_m) {
    if (!(side_m > 0.0)) throw std::invalid_argument("side must be positive");
    constexpr double deg = std::numbers::pi / 180.0;
    const double half = 0.5 * side_m;
    const double dlat = half / (kEarthRadiusM * deg);
    const double dlon = half / (kEarthRadiusM * std::cos(lat * deg) * deg);
    BoundingBox b{CoordKind::geographic, lat - dlat, lat + dlat, lon - dlon, lon + dlon};
    b.validate();
    return b;
}

BoundingBox BoundingBox::default_site() {
    return around(kDefaultSiteLat, kDefaultSiteLon, std::sqrt(kDefaultSiteAreaM2));
}

BoundingBox BoundingBox::planar(double min_x, double min_y, double max_x, double max_y) {
    BoundingBox b{CoordKind::planar, min_y, max_y, min_x, max_x};
    b.validate();
    return b;
}

WaypointFormat format_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".json" || ext == ".geojson" ? WaypointFormat::geojson : WaypointFormat::csv;
}

WaypointSet parse_waypoints_csv(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    WaypointSet set;
    bool have_header = false;
    std::unordered_set<long long> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (!have_header) {
            std::string_view first = fields[0];
            if (first.size() >= 3 && first.substr(0, 3) == "\xEF\xBB\xBF") first.remove_prefix(3);
            if (fields.size() == 3 && first == "id" && fields[1] == "lat" && fields[2] == "lon")
                set.kind = CoordKind::geographic;
            else if (fields.size() == 3 && first == "id" && fields[1] == "x" && fields[2] == "y")
                set.kind = CoordKind::planar;
            else
                throw ParseError("expected header 'id,lat,lon' or 'id,x,y'", line_no);
            have_header = true;
            continue;
        }
        if (fields.size() != 3)
            throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), line_no);
        const long long id = parse_id(fields[0], line_no);
        if (!seen.insert(id).second) throw ParseError("duplicate id " + std::to_string(id), line_no);
        Waypoint p;
        p.id = set.points.size();
        if (set.kind == CoordKind::geographic) {
            p.lat = parse_double(fields[1], "lat", line_no);
            p.lon = parse_double(fields[2], "lon", line_no);
        } else {
            p.lon = parse_double(fields[1], "x", line_no);
            p.lat = parse_double(fields[2], "y", line_no);
        }
        check_range(set.kind, p.lat, p.lon, line_no);
        set.points.push_back(p);
    }
    if (!have_header) throw ParseError("empty waypoint file");
    if (set.points.empty()) throw ParseError("waypoint file has a header but no points");
    return set;
}

WaypointSet parse_waypoints_geojson(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw ParseError("GeoJSON must be a FeatureCollection with a features array");
    WaypointSet set;
    std::unordered_set<long long> seen;
    std::size_t index = 0;
    for (const auto& f : doc["features"]) {
        const std::string where = "feature " + std::to_string(index);
        const json* geom = f.is_object() && f.contains("geometry") ? &f["geometry"] : nullptr;
        if (!geom || !geom->is_object() || geom->value("type", "") != "Point" || !geom->contains("coordinates"))
            throw ParseError(where + " is not a Point feature");
        const json& c = (*geom)["coordinates"];
        if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
            throw ParseError(where + " has malformed coordinates");
        long long id = static_cast<long long>(index);
        const json* id_field = nullptr;
        if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("id"))
            id_field = &f["properties"]["id"];
        else if (f.contains("id"))
            id_field = &f["id"];
        if (id_field) {
            if (!id_field->is_number_integer()) throw ParseError(where + " has a non-integer id");
            id = id_field->get<long long>();
        }
        if (!seen.insert(id).second) throw ParseError(where + " repeats id " + std::to_string(id));
        Waypoint p{set.points.size(), c[1].get<double>(), c[0].get<double>()};
        if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) throw ParseError(where + " has a non-finite coordinate");
        if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
            throw ParseError(where + " lies outside the geographic coordinate range");
        set.points.push_back(p);
        ++index;
    }
    if (set.points.empty()) throw ParseError("GeoJSON has no features");
    return set;
}

WaypointSet load_waypoints(const std::filesystem::path& path, WaypointFormat format) {
    if (format == WaypointFormat::geojson) return parse_waypoints_geojson(read_file(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_waypoints_csv(in);
}

WaypointSet load_waypoints(const std::filesystem::path& path) { return load_waypoints(path, format_for(path)); }

std::string waypoints_to_csv(const WaypointSet& points) {
    points.validate();
    std::string out = points.kind == CoordKind::geographic ? "id,lat,lon\n" : "id,x,y\n";
    for (const auto& p : points.points) {
        const double a = points.kind == CoordKind::geographic ? p.lat : p.lon;
        const double b = points.kind == CoordKind::geographic ? p.lon : p.lat;
        out += std::to_string(p.id) + ',' + fixed9(a) + ',' + fixed9(b) + '\n';
    }
    return out;
}

std::string waypoints_to_geojson(const WaypointSet& points) {
    points.validate();
    if (points.kind != CoordKind::geographic) throw std::invalid_argument("GeoJSON holds geographic points only");
    json features = json::array();
    for (const auto& p : points.points) {
        features.push_back({{"type", "Feature"},
                            {"properties", {{"id", p.id}}},
                            {"geometry", {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}}}});
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2) + "\n";
}

void save_waypoints(const WaypointSet& points, const std::filesystem::path& path, WaypointFormat format) {
    write_file_atomic(path, format == WaypointFormat::csv ? waypoints_to_csv(points) : waypoints_to_geojson(points));
}

void save_waypoints(const WaypointSet& points, const std::filesystem::path& path) {
    save_waypoints(points, path, format_for(path));
}

WaypointSet generate_dataset(std::size_t n, const BoundingBox& bbox, std::uint64_t rng_seed) {
    if (n == 0) throw std::invalid_argument("dataset needs at least one point");
    bbox.validate();
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> lat(bbox.min_lat, bbox.max_lat);
    std::uniform_real_distribution<double> lon(bbox.min_lon, bbox.max_lon);
    WaypointSet set{bbox.kind, {}};
    set.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lat(rng);
        const double b = lon(rng);
        set.points.push_back({i, round9_within(a, bbox.min_lat, bbox.max_lat),
                              round9_within(b, bbox.min_lon, bbox.max_lon)});
    }
    return set;
}

WaypointSet grid_points(const BoundingBox& bbox, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid needs at least one row and one column");
    bbox.validate();
    const double h = (bbox.max_lat - bbox.min_lat) / static_cast<double>(rows);
    const double w = (bbox.max_lon - bbox.min_lon) / static_cast<double>(cols);
    WaypointSet set{bbox.kind, {}};
    set.points.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            set.points.push_back({r * cols + c, bbox.min_lat + (static_cast<double>(r) + 0.5) * h,
                                  bbox.min_lon + (static_cast<double>(c) + 0.5) * w});
    return set;
}

std::string route_to_json(const Tour& tour, const WaypointSet& points) {
    check_tour(tour, points);
    json route = json::array();
    for (std::size_t idx : tour.order) {
        const Waypoint& p = points.points[idx];
        route.push_back({{"id", p.id}, {"lat", p.lat}, {"lon", p.lon}});
    }
    return json{{"length_m", tour.length_m}, {"route", route}}.dump(2) + "\n";
}

void export_route(const Tour& tour, const WaypointSet& points, const std::filesystem::path& path) {
    write_file_atomic(path, route_to_json(tour, points));
}

RouteFile parse_route(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid route JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("length_m") || !doc["length_m"].is_number() || !doc.contains("route") ||
        !doc["route"].is_array())
        throw ParseError("route JSON needs a numeric length_m and a route array");
    RouteFile out;
    out.length_m = doc["length_m"].get<double>();
    for (const auto& e : doc["route"]) {
        if (!e.is_object() || !e.contains("id") || !e["id"].is_number_unsigned() || !e.contains("lat") ||
            !e["lat"].is_number() || !e.contains("lon") || !e["lon"].is_number())
            throw ParseError("route entry " + std::to_string(out.route.size()) + " needs id, lat and lon");
        out.route.push_back({e["id"].get<std::size_t>(), e["lat"].get<double>(), e["lon"].get<double>()});
    }
    return out;
}

RouteFile import_route(const std::filesystem::path& path) { return parse_route(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(WTSP_GETPID());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wtsp
