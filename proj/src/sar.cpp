#include "gsim/sar.hpp"

#include "gsim/errors.hpp"

#include <cmath>
#include <random>

namespace gsim {

Raster pseudo_sar(const Raster& gray, std::uint64_t seed, const PseudoSarOptions& opts) {
    if (gray.bands != 1) throw DomainError("pseudo-SAR input must be grayscale");
    if (!(opts.gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(opts.looks >= 1.0)) throw DomainError("looks must be >= 1");

    Raster work = opts.down_factor > 1 ? box_downsample(gray, opts.down_factor) : gray;

    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> speckle(opts.looks, 1.0 / opts.looks);
    for (auto& s : work.samples) {
        const double remapped = 255.0 * std::pow(s / 255.0, opts.gamma);
        const double noisy = remapped * speckle(rng);
        s = static_cast<std::uint8_t>(std::lround(std::min(255.0, std::max(0.0, noisy))));
    }

    if (opts.down_factor > 1 && opts.upsample_back) {
        return resample_bilinear(work, gray.width, gray.height);
    }
    return work;
}

ReferenceMap derive_sar_map(const ReferenceMap& eo, int width_px, int height_px,
                            std::uint64_t seed, const PseudoSarOptions& opts) {
    if (width_px < 1 || height_px < 1) throw DomainError("SAR bundle size must be >= 1 pixel");
    Raster gray = to_grayscale(eo.raster);
    Raster resized = resample_bilinear(gray, width_px, height_px);

    PseudoSarOptions noise = opts;
    noise.down_factor = 1;  // resolution is already set by the resample
    noise.upsample_back = false;
    Raster sar = pseudo_sar(resized, seed, noise);

    GeoTransform gt = eo.geotransform;
    gt.pixel_size_x = eo.geotransform.pixel_size_x * eo.raster.width / static_cast<double>(width_px);
    gt.pixel_size_y =
        eo.geotransform.pixel_size_y * eo.raster.height / static_cast<double>(height_px);
    return make_reference_map(std::move(sar), gt, eo.frame, Modality::SAR,
                              "pseudo-SAR derived from: " + eo.source_descriptor);
}

}  // namespace gsim
