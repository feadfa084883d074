#include "gsim/simulate.hpp"

#include "gsim/errors.hpp"
#include "gsim/flight.hpp"
#include "gsim/stream.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

namespace gsim {

namespace fs = std::filesystem;

namespace {

std::string frame_file_name(std::int64_t frame_id, Modality modality, int bands) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%06lld_%s.%s", static_cast<long long>(frame_id),
                  modality_name(modality).c_str(), bands == 3 ? "ppm" : "pgm");
    return buf;
}

}  // namespace

SimulationSummary run_simulation(const ScenarioConfig& cfg) {
    std::map<Modality, ReferenceMap> maps;
    for (const auto& [modality, bundle] : cfg.map_bundles) {
        maps[modality] = load_bundle(bundle);
        if (maps[modality].modality != modality) {
            throw DomainError("bundle " + bundle + " declares modality " +
                              modality_name(maps[modality].modality) + ", scenario expects " +
                              modality_name(modality));
        }
    }
    return run_simulation(cfg, maps);
}

SimulationSummary run_simulation(const ScenarioConfig& cfg,
                                 const std::map<Modality, ReferenceMap>& maps) {
    validate_scenario(cfg);
    for (const auto& s : cfg.sensors) {
        if (!maps.contains(s.modality)) {
            throw DomainError("no reference map for modality " + modality_name(s.modality));
        }
    }

    // All bundles must georeference the same world frame.
    const ReferenceMap& first = maps.begin()->second;
    for (const auto& [modality, map] : maps) {
        const double dx = map.frame.origin_merc.x - first.frame.origin_merc.x;
        const double dy = map.frame.origin_merc.y - first.frame.origin_merc.y;
        const double dist = std::hypot(dx, dy) * first.frame.meters_per_mercator_unit;
        if (dist > 1.0) {
            throw DomainError("map bundles disagree on the local frame by " +
                              std::to_string(dist) + " m (" + modality_name(modality) + ")");
        }
    }

    fs::create_directories(cfg.output_dir);
    const std::string log_path = (fs::path(cfg.output_dir) / "telemetry.jsonl").string();
    TelemetrySink sink(log_path);
    std::unique_ptr<TelemetryPublisher> publisher;
    if (cfg.stream_address) {
        publisher = std::make_unique<TelemetryPublisher>(*cfg.stream_address);
    }

    const std::vector<TrajectorySample> trajectory =
        plan_trajectory(cfg.waypoints, cfg.vehicle, cfg.dt, cfg.t_end);

    // Sensor capture periods in integration steps.
    std::vector<long> periods;
    periods.reserve(cfg.sensors.size());
    for (const auto& s : cfg.sensors) {
        periods.push_back(std::max<long>(1, std::lround(1.0 / (s.rate_hz * cfg.dt))));
    }

    SimulationSummary summary;
    summary.log_path = log_path;
    std::int64_t frame_id = 0;
    for (std::size_t step = 0; step < trajectory.size(); ++step) {
        const TrajectorySample& sample = trajectory[step];
        for (std::size_t si = 0; si < cfg.sensors.size(); ++si) {
            if (static_cast<long>(step) % periods[si] != 0) continue;
            const SensorConfig& sensor = cfg.sensors[si];
            const ReferenceMap& map = maps.at(sensor.modality);

            Pose camera_pose;
            camera_pose.position = sample.pose.position;
            camera_pose.orientation = (sample.pose.orientation * sensor.mount).normalized();

            const auto frame = simulate_frame(map, sensor.intrinsics, camera_pose);
            std::string image_path;
            if (frame) {
                image_path = frame_file_name(frame_id, sensor.modality, frame->image.bands);
                write_pnm((fs::path(cfg.output_dir) / image_path).string(), frame->image);
                ++summary.emitted;
            } else {
                ++summary.suppressed;
            }
            const TelemetryRecord rec = make_record(frame_id, sample.t, sensor.modality,
                                                    sensor.intrinsics, camera_pose, map, frame,
                                                    image_path);
            const std::string line = serialize_record(rec);
            sink.write_line(line);
            if (publisher) publisher->publish(line);
            summary.telemetry.push_back(rec);
            ++summary.records;
            ++frame_id;
        }
    }
    if (publisher) publisher->stop();
    return summary;
}

}  // namespace gsim
