#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gsim {

// 8-bit band-interleaved raster, row-major, row 0 = north edge.
// bands is 1 (grayscale) or 3 (RGB).
struct Raster {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<std::uint8_t> samples;

    Raster() = default;
    Raster(int w, int h, int b);

    bool empty() const { return samples.empty(); }
    std::size_t index(int u, int v, int band) const {
        return (static_cast<std::size_t>(v) * width + u) * bands + band;
    }
    std::uint8_t at(int u, int v, int band = 0) const { return samples[index(u, v, band)]; }
    std::uint8_t& at(int u, int v, int band = 0) { return samples[index(u, v, band)]; }
};

// Validates the width/height/bands/sample-count invariants; throws DomainError.
void validate_raster(const Raster& r);

// Bilinear interpolation of the four surrounding pixel centers. Valid domain
// is 0 <= u <= width-1, 0 <= v <= height-1 (exact at integer coordinates);
// outside it throws OutOfBounds.
double sample_bilinear(const Raster& r, double u, double v, int band = 0);

// Rec.601 luma; identity for single-band input.
Raster to_grayscale(const Raster& r);

// Bilinear resample to the requested size.
Raster resample_bilinear(const Raster& r, int new_width, int new_height);

// Integer box-filter reduction by `factor` (trailing partial boxes averaged).
Raster box_downsample(const Raster& r, int factor);

// Axis-aligned sub-rectangle copy. Throws OutOfBounds when the window leaves
// the raster.
Raster crop(const Raster& r, int x0, int y0, int width, int height);

// --- Image file I/O ------------------------------------------------------
// PNM: binary PPM (P6) for 3 bands, PGM (P5) for 1 band, maxval 255.
// PNG: 8-bit gray or RGB.

Raster read_image(const std::string& path);           // by magic bytes
Raster decode_image(const std::vector<std::uint8_t>& bytes, const std::string& what);
void write_pnm(const std::string& path, const Raster& r);
void write_png(const std::string& path, const Raster& r);
std::vector<std::uint8_t> encode_png(const Raster& r);

// CRC-32 of the raw sample buffer (used by bundle metadata).
std::uint32_t raster_checksum(const Raster& r);

}  // namespace gsim
