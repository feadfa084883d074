#pragma once

#include "gsim/raster.hpp"
#include "gsim/refmap.hpp"
#include "gsim/tiles.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsim {

// Procedural terrain texture used for fixtures and demos. The texture is a
// pure function of Mercator position and the seed, so tiles rendered at any
// zoom are mutually consistent and edges are seamless.
struct SceneSpec {
    std::uint64_t seed = 20220413;
    double noise_cell_m = 48.0;   // value-noise lattice spacing at the base octave
    int noise_octaves = 3;
    double block_cell_m = 96.0;   // structure lattice spacing
    double road_period_m = 512.0; // grid spacing of dark road lines
};

// RGB at a Mercator position.
void scene_color(const SceneSpec& spec, double merc_x, double merc_y, std::uint8_t rgb[3]);

// Renders a raster whose pixel grid is defined by the geotransform.
Raster render_scene(const SceneSpec& spec, const GeoTransform& gt, int width, int height,
                    int bands);

Raster render_scene_tile(const SceneSpec& spec, const TileAddress& addr);

// Writes z/x/y.png fixture tiles for every listed address.
void write_fixture_tiles(const SceneSpec& spec, const std::string& dir,
                         const std::vector<TileAddress>& addrs);

}  // namespace gsim
