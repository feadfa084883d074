#include "gsim/refmap.hpp"

#include "gsim/errors.hpp"
#include "gsim/jsonwriter.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace gsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string modality_name(Modality m) {
    switch (m) {
        case Modality::EO: return "EO";
        case Modality::SAR: return "SAR";
        case Modality::Other: return "other";
    }
    return "other";
}

Modality modality_from_name(const std::string& name) {
    if (name == "EO") return Modality::EO;
    if (name == "SAR") return Modality::SAR;
    if (name == "other") return Modality::Other;
    throw DomainError("unknown modality '" + name + "'");
}

ReferenceMap make_reference_map(Raster raster, const GeoTransform& gt, const LocalFrame& frame,
                                Modality modality, std::string source_descriptor) {
    validate_raster(raster);
    if (!(gt.pixel_size_x > 0.0) || !(gt.pixel_size_y > 0.0)) {
        throw DomainError("geotransform pixel sizes must be positive");
    }
    ReferenceMap map;
    map.raster = std::move(raster);
    map.geotransform = gt;
    map.frame = frame;
    map.modality = modality;
    map.source_descriptor = std::move(source_descriptor);
    map.ground_resolution = gt.pixel_size_x * frame.meters_per_mercator_unit;

    // Frame origin must sit at the raster center within one pixel.
    const MercatorPoint center =
        gt.pixel_to_mercator(map.raster.width / 2.0 - 0.5, map.raster.height / 2.0 - 0.5);
    const double du = std::abs(center.x - frame.origin_merc.x) / gt.pixel_size_x;
    const double dv = std::abs(center.y - frame.origin_merc.y) / gt.pixel_size_y;
    if (du > 1.0 || dv > 1.0) {
        throw DomainError("local frame origin is " + std::to_string(std::max(du, dv)) +
                          " pixels away from the raster center");
    }
    return map;
}

double sample_bilinear(const ReferenceMap& map, double u, double v, int band) {
    return sample_bilinear(map.raster, u, v, band);
}

namespace {

std::string checksum_string(const Raster& r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", raster_checksum(r));
    return std::string("crc32:") + buf;
}

}  // namespace

void save_bundle(const ReferenceMap& map, const std::string& dir) {
    validate_raster(map.raster);
    fs::create_directories(dir);
    const std::string raster_name = map.raster.bands == 3 ? "raster.ppm" : "raster.pgm";
    write_pnm((fs::path(dir) / raster_name).string(), map.raster);

    JsonWriter w;
    w.begin_object();
    w.field("schema_version", kBundleSchemaVersion);
    w.field("crs", "EPSG:3857");
    w.field("origin_merc_x", map.geotransform.origin.x);
    w.field("origin_merc_y", map.geotransform.origin.y);
    w.field("pixel_size_x", map.geotransform.pixel_size_x);
    w.field("pixel_size_y", map.geotransform.pixel_size_y);
    w.field("center_lat", map.frame.origin_geo.lat);
    w.field("center_lon", map.frame.origin_geo.lon);
    w.field("modality", modality_name(map.modality));
    w.field("width", map.raster.width);
    w.field("height", map.raster.height);
    w.field("bands", map.raster.bands);
    w.field("checksum", checksum_string(map.raster));
    w.field("source_descriptor", map.source_descriptor);
    w.end_object();

    std::ofstream out(fs::path(dir) / "metadata.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write bundle metadata in " + dir);
    out << w.str() << "\n";
    if (!out) throw IoError("bundle metadata write failed in " + dir);
}

ReferenceMap load_bundle(const std::string& dir) {
    const fs::path meta_path = fs::path(dir) / "metadata.json";
    std::ifstream in(meta_path, std::ios::binary);
    if (!in) throw IoError("cannot open bundle metadata " + meta_path.string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        throw DomainError("bundle metadata parse error in " + dir + ": " + e.what());
    }

    const int version = meta.at("schema_version").get<int>();
    if (version != kBundleSchemaVersion) {
        throw DomainError("bundle schema version " + std::to_string(version) +
                          " unsupported (expected " + std::to_string(kBundleSchemaVersion) + ")");
    }
    if (meta.at("crs").get<std::string>() != "EPSG:3857") {
        throw DomainError("bundle crs must be EPSG:3857");
    }

    const double lat = meta.at("center_lat").get<double>();
    const double lon = meta.at("center_lon").get<double>();
    if (std::abs(lat) > kMercatorMaxLat || std::abs(lon) > 180.0) {
        throw DomainError("bundle center latitude/longitude out of range");
    }

    const int bands = meta.at("bands").get<int>();
    const std::string raster_name = bands == 3 ? "raster.ppm" : "raster.pgm";
    Raster raster = read_image((fs::path(dir) / raster_name).string());
    if (raster.width != meta.at("width").get<int>() ||
        raster.height != meta.at("height").get<int>() || raster.bands != bands) {
        throw DomainError("bundle raster dimensions do not match metadata in " + dir);
    }
    if (checksum_string(raster) != meta.at("checksum").get<std::string>()) {
        throw DomainError("bundle raster checksum mismatch in " + dir);
    }

    GeoTransform gt;
    gt.origin.x = meta.at("origin_merc_x").get<double>();
    gt.origin.y = meta.at("origin_merc_y").get<double>();
    gt.pixel_size_x = meta.at("pixel_size_x").get<double>();
    gt.pixel_size_y = meta.at("pixel_size_y").get<double>();

    const LocalFrame frame = make_local_frame(GeoPoint{lat, lon});
    std::string source;
    if (meta.contains("source_descriptor")) {
        source = meta.at("source_descriptor").get<std::string>();
    }
    return make_reference_map(std::move(raster), gt, frame,
                              modality_from_name(meta.at("modality").get<std::string>()),
                              std::move(source));
}

}  // namespace gsim
