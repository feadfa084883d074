#pragma once

#include "gsim/raster.hpp"
#include "gsim/refmap.hpp"

#include <cstdint>

namespace gsim {

// Pseudo-SAR fixture generator: gamma intensity remap plus multi-look
// multiplicative speckle, optionally with a resolution-loss round trip.
// Stands in for real SAR products, which cannot ship with the repository.
struct PseudoSarOptions {
    double gamma = 0.5;    // intensity remap exponent
    double looks = 4.0;    // speckle looks; variance of the multiplier is 1/looks
    int down_factor = 1;   // box-downsample factor applied before speckle
    bool upsample_back = false;  // restore the original size after downsampling
};

Raster pseudo_sar(const Raster& gray, std::uint64_t seed, const PseudoSarOptions& opts = {});

// Derives a SAR-modality bundle from an EO map: grayscale, resampled to the
// requested size over the identical Mercator extent, remapped and speckled.
ReferenceMap derive_sar_map(const ReferenceMap& eo, int width_px, int height_px,
                            std::uint64_t seed, const PseudoSarOptions& opts = {});

}  // namespace gsim
