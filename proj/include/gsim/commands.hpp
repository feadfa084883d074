#pragma once

#include "gsim/registration.hpp"
#include "gsim/refmap.hpp"
#include "gsim/simulate.hpp"
#include "gsim/tiles.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gsim {

// --- fetch-map -------------------------------------------------------------

struct FetchMapArgs {
    double center_lat = 0.0;
    double center_lon = 0.0;
    double width_m = 0.0;
    double height_m = 0.0;
    int zoom = 15;
    std::string source;       // URL template or tile directory
    std::string modality = "EO";
    std::string out_dir;
    int out_width_px = 0;     // optional resample to exact pixel dimensions
    int out_height_px = 0;
    TileFetchOptions fetch;
};

struct FetchMapReport {
    int width_px = 0;
    int height_px = 0;
    double width_m = 0.0;
    double height_m = 0.0;
    double ground_resolution_east = 0.0;   // m/px
    double ground_resolution_north = 0.0;  // m/px
    int tiles = 0;
};

FetchMapReport run_fetch_map(const FetchMapArgs& args, std::ostream& log);

// --- derive-sar --------------------------------------------------------------

struct DeriveSarArgs {
    std::string from_bundle;
    std::string out_dir;
    int width_px = 0;
    int height_px = 0;
    std::uint64_t seed = 0;
    double gamma = 0.5;
    double looks = 4.0;
};

void run_derive_sar(const DeriveSarArgs& args, std::ostream& log);

// --- simulate ----------------------------------------------------------------

SimulationSummary run_simulate(const std::string& scenario_path, std::ostream& log);

// --- register ----------------------------------------------------------------

struct RegisterArgs {
    std::string telemetry_path;
    std::string frames_dir;  // defaults to the telemetry log directory
    std::string reference_bundle;
    std::string method = "feature";
    std::string report_path;
    std::optional<std::string> modality_filter;
    std::uint64_t seed = 0;
    double prior_noise_px = 8.0;
    double success_threshold_px = 5.0;
};

struct RegisterSummary {
    std::vector<RegistrationResult> rows;
    long frames = 0;
    long successes = 0;
    long failures = 0;  // method produced no estimate
    double success_rate = 0.0;
    double mean_corner_rms_sensed_px = 0.0;    // over frames with an estimate
    double median_corner_rms_sensed_px = 0.0;  // over frames with an estimate
};

RegisterSummary run_register(const RegisterArgs& args, std::ostream& log);

// Serialized report row (shared with tests that parse reports).
std::string serialize_registration_result(const RegistrationResult& row);
RegistrationResult parse_registration_result(const std::string& line);

// --- fuse-overlay --------------------------------------------------------------

struct FuseOverlayArgs {
    std::string report_path;
    std::string frames_dir;
    std::string reference_bundle;
    std::string out_dir;
};

// Fused diagnostic in reference coordinates: sensed intensities warped through
// the estimate in red, reference intensities in green, the ground-truth
// quadrangle stroked in blue.
Raster render_overlay(const Raster& sensed_gray, const ReferenceMap& reference,
                      const Homography& h_est_sensed_to_ref,
                      const Homography& h_truth_sensed_to_ref);

int run_fuse_overlay(const FuseOverlayArgs& args, std::ostream& log);

// --- synth-tiles -----------------------------------------------------------

struct SynthTilesArgs {
    double center_lat = 0.0;
    double center_lon = 0.0;
    double width_m = 0.0;
    double height_m = 0.0;
    int zoom = 15;
    int margin_tiles = 1;
    std::uint64_t seed = 20220413;
    std::string out_dir;
};

int run_synth_tiles(const SynthTilesArgs& args, std::ostream& log);

}  // namespace gsim
