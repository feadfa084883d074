#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsim/errors.hpp"
#include "gsim/refmap.hpp"
#include "gsim/sar.hpp"

#include "support/fixtures.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace gsim;
namespace fs = std::filesystem;

TEST_CASE("geotransform maps pixel centers both ways") {
    GeoTransform gt;
    gt.origin = {1000.0, 2000.0};
    gt.pixel_size_x = 2.0;
    gt.pixel_size_y = 4.0;
    const MercatorPoint p = gt.pixel_to_mercator(3.0, 5.0);
    CHECK(p.x == doctest::Approx(1000.0 + 3.5 * 2.0).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(2000.0 - 5.5 * 4.0).epsilon(1e-15));
    double u = 0.0, v = 0.0;
    gt.mercator_to_pixel(p, u, v);
    CHECK(u == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("reference map derives the east ground resolution") {
    const ReferenceMap map =
        gsim::testing::make_synthetic_map({35.395703, -80.535865}, 200, 160, 1.5, 3);
    CHECK(map.ground_resolution ==
          doctest::Approx(1.5 * map.frame.meters_per_mercator_unit).epsilon(1e-9));
}

TEST_CASE("frame far from the raster center is rejected") {
    const LocalFrame frame = make_local_frame({10.0, 10.0});
    GeoTransform gt;
    gt.pixel_size_x = 1.0;
    gt.pixel_size_y = 1.0;
    gt.origin.x = frame.origin_merc.x;  // center lands half a raster away
    gt.origin.y = frame.origin_merc.y;
    Raster raster(64, 64, 1);
    CHECK_THROWS_AS(make_reference_map(raster, gt, frame, Modality::EO, ""), DomainError);
}

TEST_CASE("bundle round-trip is field-exact and pixel-exact") {
    gsim::testing::TempDir tmp("bundle");
    for (int bands : {1, 3}) {
        const ReferenceMap map = gsim::testing::make_synthetic_map(
            {35.395703, -80.535865}, 96, 80, 1.25, 42 + bands, bands);
        const std::string dir = tmp.sub("b" + std::to_string(bands));
        save_bundle(map, dir);
        const ReferenceMap back = load_bundle(dir);
        CHECK(back.raster.samples == map.raster.samples);
        CHECK(back.raster.bands == map.raster.bands);
        CHECK(back.geotransform.origin.x == map.geotransform.origin.x);
        CHECK(back.geotransform.origin.y == map.geotransform.origin.y);
        CHECK(back.geotransform.pixel_size_x == map.geotransform.pixel_size_x);
        CHECK(back.geotransform.pixel_size_y == map.geotransform.pixel_size_y);
        CHECK(back.frame.origin_geo.lat == map.frame.origin_geo.lat);
        CHECK(back.frame.origin_geo.lon == map.frame.origin_geo.lon);
        CHECK(back.modality == map.modality);
        CHECK(back.source_descriptor == map.source_descriptor);
        CHECK(back.ground_resolution == doctest::Approx(map.ground_resolution).epsilon(1e-15));
    }
}

TEST_CASE("bundle metadata carries the documented field names") {
    gsim::testing::TempDir tmp("schema");
    const ReferenceMap map =
        gsim::testing::make_synthetic_map({35.395703, -80.535865}, 64, 64, 1.0, 5);
    save_bundle(map, tmp.path());
    std::ifstream in(fs::path(tmp.path()) / "metadata.json");
    nlohmann::json meta;
    in >> meta;
    for (const char* key :
         {"schema_version", "crs", "origin_merc_x", "origin_merc_y", "pixel_size_x",
          "pixel_size_y", "center_lat", "center_lon", "modality", "width", "height", "bands",
          "checksum"}) {
        CHECK(meta.contains(key));
    }
    CHECK(meta["crs"] == "EPSG:3857");
}

TEST_CASE("tampered metadata fails validation on load") {
    gsim::testing::TempDir tmp("tamper");
    const ReferenceMap map =
        gsim::testing::make_synthetic_map({35.395703, -80.535865}, 64, 64, 1.0, 6);
    save_bundle(map, tmp.path());
    const fs::path meta_path = fs::path(tmp.path()) / "metadata.json";

    nlohmann::json meta;
    {
        std::ifstream in(meta_path);
        in >> meta;
    }
    SUBCASE("latitude out of range") {
        meta["center_lat"] = 91.0;
        std::ofstream(meta_path) << meta.dump();
        CHECK_THROWS_AS(load_bundle(tmp.path()), DomainError);
    }
    SUBCASE("schema version mismatch") {
        meta["schema_version"] = 999;
        std::ofstream(meta_path) << meta.dump();
        CHECK_THROWS_AS(load_bundle(tmp.path()), DomainError);
    }
    SUBCASE("checksum mismatch") {
        meta["checksum"] = "crc32:deadbeef";
        std::ofstream(meta_path) << meta.dump();
        CHECK_THROWS_AS(load_bundle(tmp.path()), DomainError);
    }
}

TEST_CASE("missing bundle directory raises IoError") {
    CHECK_THROWS_AS(load_bundle("/nonexistent/bundle/dir"), IoError);
}

TEST_CASE("reference-map bilinear sampling matches raster sampling") {
    const ReferenceMap map =
        gsim::testing::make_synthetic_map({35.395703, -80.535865}, 64, 64, 1.0, 7);
    CHECK(sample_bilinear(map, 10.25, 20.75, 1) ==
          sample_bilinear(map.raster, 10.25, 20.75, 1));
    CHECK_THROWS_AS(sample_bilinear(map, -1.0, 0.0), OutOfBounds);
}

TEST_CASE("derived SAR bundle keeps the extent and goes grayscale") {
    const ReferenceMap eo =
        gsim::testing::make_synthetic_map({35.395703, -80.535865}, 400, 320, 1.2, 8);
    const ReferenceMap sar = derive_sar_map(eo, 50, 40, 77);
    CHECK(sar.raster.bands == 1);
    CHECK(sar.raster.width == 50);
    CHECK(sar.raster.height == 40);
    CHECK(sar.modality == Modality::SAR);
    // Same Mercator extent, coarser pixels.
    CHECK(sar.geotransform.pixel_size_x * 50 ==
          doctest::Approx(eo.geotransform.pixel_size_x * 400).epsilon(1e-12));
    CHECK(sar.geotransform.pixel_size_y * 40 ==
          doctest::Approx(eo.geotransform.pixel_size_y * 320).epsilon(1e-12));
    CHECK(sar.frame.origin_geo.lat == eo.frame.origin_geo.lat);

    // Speckle is seeded: same seed reproduces, different seed does not.
    const ReferenceMap sar_same = derive_sar_map(eo, 50, 40, 77);
    const ReferenceMap sar_diff = derive_sar_map(eo, 50, 40, 78);
    CHECK(sar_same.raster.samples == sar.raster.samples);
    CHECK(sar_diff.raster.samples != sar.raster.samples);
}

TEST_CASE("pseudo-SAR preserves mean brightness within speckle tolerance") {
    const ReferenceMap eo =
        gsim::testing::make_synthetic_map({0.0, 0.0}, 256, 256, 1.0, 9, 1);
    PseudoSarOptions opts;
    opts.gamma = 1.0;  // isolate the speckle
    const Raster noisy = pseudo_sar(eo.raster, 1234, opts);
    double mean_in = 0.0, mean_out = 0.0;
    for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
        mean_in += eo.raster.samples[i];
        mean_out += noisy.samples[i];
    }
    mean_in /= static_cast<double>(noisy.samples.size());
    mean_out /= static_cast<double>(noisy.samples.size());
    // Unit-mean multiplicative speckle: the image mean moves by < 2%.
    CHECK(std::abs(mean_out - mean_in) / mean_in < 0.02);
}
