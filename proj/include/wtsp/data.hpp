#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wtsp/core.hpp"

namespace wtsp {

/// Axis-aligned region. For planar boxes the lat fields hold y and the lon
/// fields hold x, in meters.
struct BoundingBox {
    CoordKind kind = CoordKind::geographic;
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    void validate() const;
    [[nodiscard]] bool contains(const Waypoint& p) const noexcept;
    [[nodiscard]] double center_lat() const noexcept { return 0.5 * (min_lat + max_lat); }
    [[nodiscard]] double center_lon() const noexcept { return 0.5 * (min_lon + max_lon); }

    /// Geographic square of `side_m` meters centred on (lat, lon).
    [[nodiscard]] static BoundingBox around(double lat, double lon, double side_m);
    /// The default 11 km^2 survey site.
    [[nodiscard]] static BoundingBox default_site();
    [[nodiscard]] static BoundingBox planar(double min_x, double min_y, double max_x, double max_y);
};

inline constexpr double kDefaultSiteLat = 6.875;
inline constexpr double kDefaultSiteLon = -8.10;
inline constexpr double kDefaultSiteAreaM2 = 11.0e6;

enum class WaypointFormat { csv, geojson };

/// Format from the file extension: .json/.geojson are GeoJSON, anything else CSV.
[[nodiscard]] WaypointFormat format_for(const std::filesystem::path& path);

/// CSV with header `id,lat,lon` (geographic) or `id,x,y` (planar). Ids must
/// be unique integers and are renumbered 0..n-1 in file order. Throws
/// ParseError naming the offending line.
[[nodiscard]] WaypointSet parse_waypoints_csv(std::istream& in);
/// FeatureCollection of Point features, coordinates [lon, lat].
[[nodiscard]] WaypointSet parse_waypoints_geojson(std::string_view text);

[[nodiscard]] WaypointSet load_waypoints(const std::filesystem::path& path, WaypointFormat format);
[[nodiscard]] WaypointSet load_waypoints(const std::filesystem::path& path);

/// Coordinates with 9 fractional digits.
[[nodiscard]] std::string waypoints_to_csv(const WaypointSet& points);
[[nodiscard]] std::string waypoints_to_geojson(const WaypointSet& points);
void save_waypoints(const WaypointSet& points, const std::filesystem::path& path, WaypointFormat format);
void save_waypoints(const WaypointSet& points, const std::filesystem::path& path);

/// n points drawn uniformly over `bbox`, rounded to 9 fractional digits so
/// they survive a CSV round trip unchanged.
[[nodiscard]] WaypointSet generate_dataset(std::size_t n, const BoundingBox& bbox, std::uint64_t rng_seed);

/// Centers of a rows x cols subdivision of `bbox`, row-major; rows run along
/// lat (y) and columns along lon (x).
[[nodiscard]] WaypointSet grid_points(const BoundingBox& bbox, std::size_t rows, std::size_t cols);

struct RouteFile {
    double length_m = 0.0;
    std::vector<Waypoint> route;
};

/// `{"length_m": ..., "route": [{"id", "lat", "lon"}, ...]}` in visit order.
[[nodiscard]] std::string route_to_json(const Tour& tour, const WaypointSet& points);
void export_route(const Tour& tour, const WaypointSet& points, const std::filesystem::path& path);
[[nodiscard]] RouteFile parse_route(std::string_view text);
[[nodiscard]] RouteFile import_route(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace wtsp
