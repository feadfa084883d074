#include "gsim/scenario.hpp"

#include "gsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace gsim {

using nlohmann::json;

namespace {

CameraIntrinsics parse_intrinsics(const json& j) {
    CameraIntrinsics k;
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
    validate_intrinsics(k);
    return k;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DomainError("scenario parse error in " + path + ": " + e.what());
    }

    ScenarioConfig cfg;
    try {
        cfg.seed = j.value("seed", 0ULL);
        cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("stream_address")) {
            cfg.stream_address = j.at("stream_address").get<std::string>();
        }
        for (const auto& [name, bundle] : j.at("maps").items()) {
            cfg.map_bundles[modality_from_name(name)] = bundle.get<std::string>();
        }
        for (const auto& s : j.at("sensors")) {
            SensorConfig sensor;
            sensor.modality = modality_from_name(s.at("modality").get<std::string>());
            sensor.rate_hz = s.value("rate_hz", 2.0);
            sensor.intrinsics = parse_intrinsics(s.at("intrinsics"));
            if (s.contains("mount_quat_wxyz")) {
                const auto& q = s.at("mount_quat_wxyz");
                sensor.mount = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                                  q.at(2).get<double>(), q.at(3).get<double>())
                                   .normalized();
            }
            cfg.sensors.push_back(sensor);
        }
        for (const auto& w : j.at("waypoints")) {
            Waypoint wp;
            wp.position = {w.at("x").get<double>(), w.at("y").get<double>(),
                           w.at("z").get<double>()};
            wp.capture_radius = w.value("capture_radius", 50.0);
            cfg.waypoints.push_back(wp);
        }
        if (j.contains("vehicle")) {
            const auto& v = j.at("vehicle");
            cfg.vehicle.airspeed = v.value("airspeed", cfg.vehicle.airspeed);
            if (v.contains("max_roll_deg")) {
                cfg.vehicle.max_roll = degrees_to_radians(v.at("max_roll_deg").get<double>());
            }
            if (v.contains("roll_rate_limit_deg_s")) {
                cfg.vehicle.roll_rate_limit =
                    degrees_to_radians(v.at("roll_rate_limit_deg_s").get<double>());
            }
            cfg.vehicle.max_climb_rate = v.value("max_climb_rate", cfg.vehicle.max_climb_rate);
            cfg.vehicle.roll_gain = v.value("roll_gain", cfg.vehicle.roll_gain);
            cfg.vehicle.climb_gain = v.value("climb_gain", cfg.vehicle.climb_gain);
        }
        cfg.dt = j.value("dt", 0.02);
        cfg.t_end = j.value("t_end", 120.0);
    } catch (const json::exception& e) {
        throw DomainError("scenario schema error in " + path + ": " + e.what());
    }
    validate_scenario(cfg);
    return cfg;
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (cfg.output_dir.empty()) throw DomainError("scenario output_dir is required");
    if (cfg.sensors.empty()) throw DomainError("scenario needs at least one sensor");
    if (cfg.waypoints.size() < 2) throw DomainError("scenario needs at least 2 waypoints");
    if (!(cfg.dt > 0.0)) throw DomainError("scenario dt must be positive");
    if (!(cfg.t_end > 0.0)) throw DomainError("scenario t_end must be positive");
    for (const auto& s : cfg.sensors) {
        if (!(s.rate_hz > 0.0)) throw DomainError("sensor rate must be positive");
        if (!cfg.map_bundles.contains(s.modality)) {
            throw DomainError("no map bundle configured for sensor modality " +
                              modality_name(s.modality));
        }
    }
}

}  // namespace gsim
