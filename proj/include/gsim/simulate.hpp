#pragma once

#include "gsim/scenario.hpp"
#include "gsim/telemetry.hpp"

#include <map>
#include <string>
#include <vector>

namespace gsim {

struct SimulationSummary {
    long records = 0;
    long emitted = 0;
    long suppressed = 0;
    std::string log_path;
    std::vector<TelemetryRecord> telemetry;  // in frame_id order
};

// Runs the full simulation: plans the trajectory, generates frames for every
// sensor at its rate against its modality's reference map, writes image files
// and the telemetry log, and optionally serves the live stream. Fully
// deterministic for a fixed scenario.
SimulationSummary run_simulation(const ScenarioConfig& cfg);

// Variant against preloaded maps (used by tests to skip bundle I/O).
SimulationSummary run_simulation(const ScenarioConfig& cfg,
                                 const std::map<Modality, ReferenceMap>& maps);

}  // namespace gsim
