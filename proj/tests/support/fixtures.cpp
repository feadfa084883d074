#include "support/fixtures.hpp"

#include <filesystem>
#include <random>

namespace gsim::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = (fs::temp_directory_path() /
             ("gsim_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(::getpid())))
                .string();
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::sub(const std::string& name) const {
    return (fs::path(path_) / name).string();
}

ReferenceMap make_synthetic_map(const GeoPoint& center, int width, int height, double pixel_size,
                                std::uint64_t seed, int bands) {
    const LocalFrame frame = make_local_frame(center);
    GeoTransform gt;
    gt.pixel_size_x = pixel_size;
    gt.pixel_size_y = pixel_size;
    gt.origin.x = frame.origin_merc.x - width / 2.0 * pixel_size;
    gt.origin.y = frame.origin_merc.y + height / 2.0 * pixel_size;
    SceneSpec spec;
    spec.seed = seed;
    Raster raster = render_scene(spec, gt, width, height, bands);
    return make_reference_map(std::move(raster), gt, frame, Modality::EO, "synthetic fixture");
}

NominalScene make_nominal_scene(const std::string& output_dir, std::uint64_t seed) {
    NominalScene scene;
    // 1200 px at ~1.2 Mercator m/px, centered at the sample launch site.
    scene.map = make_synthetic_map(GeoPoint{35.395703, -80.535865}, 1200, 1200, 1.2, seed);

    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.output_dir = output_dir;
    cfg.map_bundles[Modality::EO] = "";  // maps passed directly
    SensorConfig sensor;
    sensor.modality = Modality::EO;
    sensor.rate_hz = 2.0;
    sensor.intrinsics.fx = 256.0;
    sensor.intrinsics.fy = 256.0;
    sensor.intrinsics.cx = 128.0;
    sensor.intrinsics.cy = 96.0;
    sensor.intrinsics.width = 256;
    sensor.intrinsics.height = 192;
    cfg.sensors.push_back(sensor);
    // Straight south-to-north overflight through the map center. The map is
    // ~1.17 km wide on the ground; the footprint at 250 m altitude is ~250 m.
    cfg.waypoints.push_back(Waypoint{{0.0, -400.0, 250.0}, 30.0});
    cfg.waypoints.push_back(Waypoint{{0.0, 400.0, 250.0}, 30.0});
    cfg.vehicle.airspeed = 25.0;
    cfg.dt = 0.02;
    cfg.t_end = 32.0;
    scene.scenario = cfg;
    return scene;
}

}  // namespace gsim::testing
