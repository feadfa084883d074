#pragma once

#include <cmath>

namespace gsim {

// Spherical Web Mercator (EPSG:3857) earth radius in meters.
inline constexpr double kEarthRadius = 6378137.0;

// Largest latitude representable in Web Mercator (square world).
inline constexpr double kMercatorMaxLat = 85.05112878;

// Half extent of the Mercator plane: pi * R.
inline constexpr double kMercatorHalfExtent = 20037508.342789244;

// WGS84 geographic coordinates in degrees.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Projected EPSG:3857 coordinates in Mercator meters.
struct MercatorPoint {
    double x = 0.0;
    double y = 0.0;
};

// East-north-up position in a LocalFrame, meters. z = 0 is the ground plane.
struct LocalPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Local planar world frame anchored at a geographic origin.
//
// Mercator meters are inflated by 1/cos(lat) relative to ground meters; the
// frame applies the origin-latitude scale factor uniformly. Over regions of a
// few kilometers the residual distortion is below 0.01%.
struct LocalFrame {
    GeoPoint origin_geo;
    MercatorPoint origin_merc;
    double meters_per_mercator_unit = 1.0;  // cos(origin latitude)
};

double degrees_to_radians(double deg);
double radians_to_degrees(double rad);

// Spherical Mercator forward projection. Throws DomainError when |lat| exceeds
// the Mercator latitude bound or |lon| > 180.
MercatorPoint wgs84_to_webmercator(const GeoPoint& p);

// Inverse projection. Throws DomainError when the point lies outside the
// Mercator plane.
GeoPoint webmercator_to_wgs84(const MercatorPoint& p);

// Builds a frame with its origin at the given geographic point.
LocalFrame make_local_frame(const GeoPoint& origin);

LocalPoint mercator_to_local(const LocalFrame& frame, const MercatorPoint& p);
MercatorPoint local_to_mercator(const LocalFrame& frame, const LocalPoint& p);

}  // namespace gsim
