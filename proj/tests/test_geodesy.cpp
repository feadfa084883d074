#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsim/errors.hpp"
#include "gsim/geodesy.hpp"

#include <cmath>
#include <random>

using namespace gsim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("projection fixed point at the origin") {
    const MercatorPoint p = wgs84_to_webmercator({0.0, 0.0});
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
}

TEST_CASE("antimeridian maps to pi times the earth radius") {
    const MercatorPoint p = wgs84_to_webmercator({0.0, 180.0});
    CHECK(std::abs(p.x - 20037508.342789244) < 1e-6);
    CHECK(std::abs(p.y) < 1e-9);
}

TEST_CASE("launch-site coordinates project per the spherical formula") {
    // Independently computed: x = R * lon_rad, y = R * ln(tan(pi/4 + lat_rad/2)).
    const MercatorPoint p = wgs84_to_webmercator({35.395703, -80.535865});
    CHECK(p.x == doctest::Approx(-8965211.482396).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(4217786.474764).epsilon(1e-9));
}

TEST_CASE("latitude outside Mercator bounds is a domain error") {
    CHECK_THROWS_AS(wgs84_to_webmercator({85.06, 0.0}), DomainError);
    CHECK_THROWS_AS(wgs84_to_webmercator({-90.0, 0.0}), DomainError);
    CHECK_THROWS_AS(wgs84_to_webmercator({std::nan(""), 0.0}), DomainError);
    CHECK_NOTHROW(wgs84_to_webmercator({85.05112878, 0.0}));
}

TEST_CASE("inverse projection at the antimeridian") {
    const GeoPoint g = webmercator_to_wgs84({20037508.3427892, 0.0});
    CHECK(g.lat == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.lon == doctest::Approx(180.0).epsilon(1e-12));
    CHECK_THROWS_AS(webmercator_to_wgs84({2.1e7, 0.0}), DomainError);
}

TEST_CASE("projection round-trip over 1000 random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(-85.0, 85.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint g{lat(rng), lon(rng)};
        const GeoPoint back = webmercator_to_wgs84(wgs84_to_webmercator(g));
        worst = std::max({worst, std::abs(back.lat - g.lat), std::abs(back.lon - g.lon)});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("projection is monotone in each argument") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lat(-85.0, 84.9);
    std::uniform_real_distribution<double> lon(-180.0, 179.9);
    for (int i = 0; i < 200; ++i) {
        const double la = lat(rng), lo = lon(rng);
        CHECK(wgs84_to_webmercator({la, lo + 0.05}).x > wgs84_to_webmercator({la, lo}).x);
        CHECK(wgs84_to_webmercator({la + 0.05, lo}).y > wgs84_to_webmercator({la, lo}).y);
    }
}

TEST_CASE("local frame maps its origin to zero") {
    const LocalFrame frame = make_local_frame({35.395703, -80.535865});
    const LocalPoint p = mercator_to_local(frame, frame.origin_merc);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 0.0);
    // The frame invariant: origin_merc is the projection of origin_geo.
    const MercatorPoint reproj = wgs84_to_webmercator(frame.origin_geo);
    CHECK(std::abs(reproj.x - frame.origin_merc.x) < 1e-6);
    CHECK(std::abs(reproj.y - frame.origin_merc.y) < 1e-6);
}

TEST_CASE("equatorial frame has unit scale") {
    const LocalFrame frame = make_local_frame({0.0, 10.0});
    const LocalPoint p =
        mercator_to_local(frame, {frame.origin_merc.x + 100.0, frame.origin_merc.y});
    CHECK(p.x == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frame at 60 degrees halves eastward offsets") {
    const LocalFrame frame = make_local_frame({60.0, 0.0});
    CHECK(frame.meters_per_mercator_unit == doctest::Approx(0.5).epsilon(1e-12));
    const LocalPoint p =
        mercator_to_local(frame, {frame.origin_merc.x + 100.0, frame.origin_merc.y});
    CHECK(p.x == doctest::Approx(50.0).epsilon(1e-9));
    const MercatorPoint back = local_to_mercator(frame, {50.0, 0.0, 0.0});
    CHECK(back.x == doctest::Approx(frame.origin_merc.x + 100.0).epsilon(1e-12));
}

TEST_CASE("local frame scale law at the origin") {
    // One local meter corresponds to 1/cos(lat0) Mercator meters exactly.
    const LocalFrame frame = make_local_frame({47.3, 8.5});
    const MercatorPoint m = local_to_mercator(frame, {1.0, 0.0, 0.0});
    const double cos_lat = std::cos(47.3 * kPi / 180.0);
    CHECK((m.x - frame.origin_merc.x) * cos_lat == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("local round-trip over 1000 random points") {
    const LocalFrame frame = make_local_frame({35.395703, -80.535865});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const MercatorPoint m{frame.origin_merc.x + coord(rng), frame.origin_merc.y + coord(rng)};
        const MercatorPoint back = local_to_mercator(frame, mercator_to_local(frame, m));
        worst = std::max({worst, std::abs(back.x - m.x), std::abs(back.y - m.y)});
    }
    CHECK(worst < 1e-6);
}
