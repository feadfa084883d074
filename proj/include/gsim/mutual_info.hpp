#pragma once

#include "gsim/camera.hpp"
#include "gsim/raster.hpp"

#include <cstdint>

namespace gsim {

// Shannon entropy of the intensity histogram, in bits.
double histogram_entropy(const Raster& gray, int bins = 32);

// Mutual information of two equal-size grayscale rasters over a bins x bins
// joint histogram, in bits. Symmetric; 0 <= MI <= min(H(a), H(b)). Throws
// DomainError on size mismatch or bins < 2.
double mutual_information(const Raster& a, const Raster& b, int bins = 32);

struct MiRegisterConfig {
    int bins = 32;
    double search_radius_px = 10.0;  // translation restart offsets
    double rot_span_rad = 0.07;      // rotation restart offsets (~4 deg)
    int simplex_max_evals = 160;     // per similarity-stage start
    int refine_max_evals = 320;      // projective refinement budget
    double min_overlap = 0.3;        // valid-pixel fraction below which a pose is rejected
    bool projective_refine = true;
};

struct MiRegistration {
    Homography h;        // sensed -> reference
    double mi_bits = 0.0;
    double init_mi_bits = 0.0;
    long evaluations = 0;
};

// Maximizes MI(sensed, reference warped into the sensed frame) over a 4-DOF
// similarity (translation, rotation, log-scale) by multi-start Nelder-Mead
// (3x3x3 restart grid around init), then optionally refines all 8 projective
// parameters. Throws RegistrationFailed when no candidate improves on the
// initialization.
MiRegistration mi_register(const Raster& sensed_gray, const Raster& reference_gray,
                           const Homography& init_sensed_to_ref,
                           const MiRegisterConfig& cfg = {});

}  // namespace gsim
