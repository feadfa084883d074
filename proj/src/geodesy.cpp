#include "gsim/geodesy.hpp"

#include "gsim/errors.hpp"

#include <cmath>
#include <string>

namespace gsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Absolute slack on range checks; covers the rounding of the published
// 85.05112878 latitude limit, which projects a fraction of a millimeter
// beyond pi*R.
constexpr double kMercatorBoundSlack = 1e-3;
}  // namespace

double degrees_to_radians(double deg) { return deg * (kPi / 180.0); }
double radians_to_degrees(double rad) { return rad * (180.0 / kPi); }

MercatorPoint wgs84_to_webmercator(const GeoPoint& p) {
    if (!(std::abs(p.lat) <= kMercatorMaxLat)) {
        throw DomainError("latitude " + std::to_string(p.lat) +
                          " outside Web Mercator bounds (|lat| <= 85.05112878)");
    }
    if (!(std::abs(p.lon) <= 180.0)) {
        throw DomainError("longitude " + std::to_string(p.lon) + " outside [-180, 180]");
    }
    const double lat_rad = degrees_to_radians(p.lat);
    const double lon_rad = degrees_to_radians(p.lon);
    MercatorPoint out;
    out.x = kEarthRadius * lon_rad;
    // asinh(tan(lat)) == ln(tan(pi/4 + lat/2)), exact at the equator.
    out.y = kEarthRadius * std::asinh(std::tan(lat_rad));
    return out;
}

GeoPoint webmercator_to_wgs84(const MercatorPoint& p) {
    if (!(std::abs(p.x) <= kMercatorHalfExtent + kMercatorBoundSlack) ||
        !(std::abs(p.y) <= kMercatorHalfExtent + kMercatorBoundSlack)) {
        throw DomainError("Mercator point (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ") outside the projected plane");
    }
    GeoPoint out;
    out.lon = radians_to_degrees(p.x / kEarthRadius);
    out.lat = radians_to_degrees(2.0 * std::atan(std::exp(p.y / kEarthRadius)) - kPi / 2.0);
    return out;
}

LocalFrame make_local_frame(const GeoPoint& origin) {
    LocalFrame frame;
    frame.origin_geo = origin;
    frame.origin_merc = wgs84_to_webmercator(origin);
    frame.meters_per_mercator_unit = std::cos(degrees_to_radians(origin.lat));
    return frame;
}

LocalPoint mercator_to_local(const LocalFrame& frame, const MercatorPoint& p) {
    LocalPoint out;
    out.x = (p.x - frame.origin_merc.x) * frame.meters_per_mercator_unit;
    out.y = (p.y - frame.origin_merc.y) * frame.meters_per_mercator_unit;
    out.z = 0.0;
    return out;
}

MercatorPoint local_to_mercator(const LocalFrame& frame, const LocalPoint& p) {
    MercatorPoint out;
    out.x = frame.origin_merc.x + p.x / frame.meters_per_mercator_unit;
    out.y = frame.origin_merc.y + p.y / frame.meters_per_mercator_unit;
    return out;
}

}  // namespace gsim
