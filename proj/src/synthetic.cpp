#include "gsim/synthetic.hpp"

#include "gsim/errors.hpp"

#include <cmath>
#include <filesystem>

namespace gsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash3(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
    std::uint64_t h = splitmix64(seed ^ 0xa24baed4963ee407ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(b));
    h = splitmix64(h ^ static_cast<std::uint64_t>(c));
    return h;
}

double hash_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise on an integer lattice, smoothstep-interpolated.
double value_noise(std::uint64_t seed, double x, double y, int octave) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = smoothstep(x - fx);
    const double ty = smoothstep(y - fy);
    const double v00 = hash_unit(hash3(seed, ix, iy, octave));
    const double v10 = hash_unit(hash3(seed, ix + 1, iy, octave));
    const double v01 = hash_unit(hash3(seed, ix, iy + 1, octave));
    const double v11 = hash_unit(hash3(seed, ix + 1, iy + 1, octave));
    return (v00 * (1.0 - tx) + v10 * tx) * (1.0 - ty) + (v01 * (1.0 - tx) + v11 * tx) * ty;
}

}  // namespace

void scene_color(const SceneSpec& spec, double merc_x, double merc_y, std::uint8_t rgb[3]) {
    // Fractal base terrain in [0,1].
    double terrain = 0.0;
    double amp = 0.55;
    double scale = spec.noise_cell_m;
    for (int o = 0; o < spec.noise_octaves; ++o) {
        terrain += amp * value_noise(spec.seed, merc_x / scale, merc_y / scale, o);
        amp *= 0.5;
        scale *= 0.5;
    }

    // Blocky structures: a fraction of lattice cells hold a rectangle of
    // hashed brightness with sharp edges (gives corner detectors real work).
    const double bx = merc_x / spec.block_cell_m;
    const double by = merc_y / spec.block_cell_m;
    const auto cx = static_cast<std::int64_t>(std::floor(bx));
    const auto cy = static_cast<std::int64_t>(std::floor(by));
    const std::uint64_t cell = hash3(spec.seed, cx, cy, 101);
    bool structure = false;
    double structure_value = 0.0;
    if ((cell & 0xff) < 140) {
        const double u = bx - std::floor(bx);
        const double v = by - std::floor(by);
        const double x0 = 0.08 + 0.30 * hash_unit(splitmix64(cell ^ 1));
        const double y0 = 0.08 + 0.30 * hash_unit(splitmix64(cell ^ 2));
        const double x1 = x0 + 0.18 + 0.38 * hash_unit(splitmix64(cell ^ 3));
        const double y1 = y0 + 0.18 + 0.38 * hash_unit(splitmix64(cell ^ 4));
        if (u >= x0 && u <= x1 && v >= y0 && v <= y1) {
            structure = true;
            structure_value = (cell & 0x100) ? 0.15 + 0.2 * hash_unit(splitmix64(cell ^ 5))
                                             : 0.75 + 0.25 * hash_unit(splitmix64(cell ^ 6));
        }
    }

    // Road grid: thin dark bands along Mercator grid lines.
    const double road_half_width_m = 3.5;
    const double rx = std::abs(merc_x - spec.road_period_m * std::round(merc_x / spec.road_period_m));
    const double ry = std::abs(merc_y - spec.road_period_m * std::round(merc_y / spec.road_period_m));
    const bool road = rx < road_half_width_m || ry < road_half_width_m;

    double value = terrain;
    double tint_r = 0.82, tint_g = 0.95, tint_b = 0.72;  // vegetation-like
    if (structure) {
        value = structure_value;
        tint_r = tint_g = tint_b = 1.0;
    }
    if (road) {
        value = 0.22 + 0.08 * terrain;
        tint_r = tint_g = tint_b = 1.0;
    }
    const double base = 35.0 + 205.0 * value;
    auto quantize = [](double x) {
        const long q = std::lround(x);
        return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
    };
    rgb[0] = quantize(base * tint_r);
    rgb[1] = quantize(base * tint_g);
    rgb[2] = quantize(base * tint_b);
}

Raster render_scene(const SceneSpec& spec, const GeoTransform& gt, int width, int height,
                    int bands) {
    Raster out(width, height, bands);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const MercatorPoint p = gt.pixel_to_mercator(u, v);
            std::uint8_t rgb[3];
            scene_color(spec, p.x, p.y, rgb);
            if (bands == 3) {
                out.at(u, v, 0) = rgb[0];
                out.at(u, v, 1) = rgb[1];
                out.at(u, v, 2) = rgb[2];
            } else {
                const double y = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
                out.at(u, v, 0) = static_cast<std::uint8_t>(std::lround(y));
            }
        }
    }
    return out;
}

Raster render_scene_tile(const SceneSpec& spec, const TileAddress& addr) {
    const MercatorRect bounds = tile_bounds(addr);
    GeoTransform gt;
    gt.origin.x = bounds.min_x;
    gt.origin.y = bounds.max_y;
    gt.pixel_size_x = tile_pixel_size(addr.z);
    gt.pixel_size_y = tile_pixel_size(addr.z);
    return render_scene(spec, gt, kTileSize, kTileSize, 3);
}

void write_fixture_tiles(const SceneSpec& spec, const std::string& dir,
                         const std::vector<TileAddress>& addrs) {
    namespace fs = std::filesystem;
    for (const auto& addr : addrs) {
        const fs::path tile_dir = fs::path(dir) / std::to_string(addr.z) / std::to_string(addr.x);
        fs::create_directories(tile_dir);
        write_png((tile_dir / (std::to_string(addr.y) + ".png")).string(),
                  render_scene_tile(spec, addr));
    }
}

}  // namespace gsim
