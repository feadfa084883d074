#pragma once

#include "gsim/camera.hpp"
#include "gsim/features.hpp"
#include "gsim/mutual_info.hpp"
#include "gsim/ransac.hpp"
#include "gsim/refmap.hpp"
#include "gsim/telemetry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace gsim {

enum class RegistrationMethod { Feature, MutualInfo };

RegistrationMethod registration_method_from_name(const std::string& name);
std::string registration_method_name(RegistrationMethod m);

// RMS distance between the width x height image corners mapped through the
// two transforms (both taken in the same direction). Zero iff they agree on
// the corners.
double corner_rms_error(const Homography& h_est, const Homography& h_truth, int width,
                        int height);

struct RegisterConfig {
    RegistrationMethod method = RegistrationMethod::Feature;
    double prior_noise_px = 8.0;       // uniform +-offset at sensed resolution
    double success_threshold_px = 5.0; // corner RMS at sensed resolution
    double roi_margin_sensed_px = 48.0;
    FeatureConfig features;
    RansacConfig ransac;
    MiRegisterConfig mi;
};

// Outcome of registering one sensed frame against the reference map.
struct RegistrationResult {
    std::int64_t frame_id = 0;
    Modality modality = Modality::EO;
    RegistrationMethod method = RegistrationMethod::Feature;
    bool failed = false;          // method produced no estimate at all
    std::string failure_reason;
    Homography h_est;             // sensed -> reference (valid when !failed)
    double score = 0.0;           // inlier count (feature) or final MI bits (MI)
    double corner_rms_ref_px = 0.0;
    double corner_rms_sensed_px = 0.0;
    bool success = false;         // corner_rms_sensed_px < threshold
    std::string image_path;
    std::array<double, 9> h_truth_ref_to_sensor{};
};

// Deterministic per-frame seed derived from the run seed.
std::uint64_t frame_seed(std::uint64_t run_seed, std::int64_t frame_id);

// Truth homography (sensed -> reference) from a telemetry record.
Homography truth_sensed_to_ref(const TelemetryRecord& rec);

// Simulates an inertial prior: the truth transform perturbed by a seeded
// uniform translation of up to noise_px sensed pixels (expressed in the
// reference frame).
Homography make_prior(const Homography& truth, double noise_px, std::uint64_t seed);

// Runs one method on one frame against the reference map, scoring against
// the record's logged truth. Never throws for per-frame method failures;
// those are reported in the result.
RegistrationResult register_frame(const Raster& sensed, const ReferenceMap& reference,
                                  const TelemetryRecord& truth_record,
                                  const RegisterConfig& cfg, std::uint64_t run_seed);

}  // namespace gsim
