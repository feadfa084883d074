#pragma once

#include "gsim/camera.hpp"
#include "gsim/flight.hpp"
#include "gsim/refmap.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsim {

struct SensorConfig {
    Modality modality = Modality::EO;
    double rate_hz = 2.0;
    CameraIntrinsics intrinsics;
    Eigen::Quaterniond mount = VehicleConfig::nadir_mount();  // camera -> body
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    std::string output_dir;
    std::optional<std::string> stream_address;
    std::map<Modality, std::string> map_bundles;  // modality -> bundle dir
    std::vector<SensorConfig> sensors;
    std::vector<Waypoint> waypoints;
    VehicleConfig vehicle;
    double dt = 0.02;
    double t_end = 120.0;
};

// Parses and validates a scenario JSON file. Paths stay relative to the
// process working directory. Throws DomainError / IoError.
ScenarioConfig load_scenario(const std::string& path);

// Validation shared by the file loader and programmatic construction.
void validate_scenario(const ScenarioConfig& cfg);

}  // namespace gsim
