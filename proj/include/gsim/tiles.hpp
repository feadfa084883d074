#pragma once

#include "gsim/geodesy.hpp"
#include "gsim/raster.hpp"
#include "gsim/refmap.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace gsim {

inline constexpr int kTileSize = 256;

// Standard XYZ (slippy map) tile address.
struct TileAddress {
    int z = 0;
    int x = 0;
    int y = 0;

    auto operator<=>(const TileAddress&) const = default;
    std::string to_string() const;
};

// Axis-aligned rectangle in Mercator meters.
struct MercatorRect {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

// Mercator meters covered by one tile edge at zoom z.
double tile_extent(int z);
// Mercator meters per pixel at zoom z.
double tile_pixel_size(int z);
// Mercator bounds of a tile (min_y is the south edge).
MercatorRect tile_bounds(const TileAddress& addr);

// Tile containing a geographic point. Throws DomainError outside Mercator
// latitude bounds or for z < 0.
TileAddress tile_for_geo(const GeoPoint& p, int z);

// Mercator bbox of the metric box centered at `center`; ground meters are
// converted to Mercator meters with the center-latitude scale.
MercatorRect bbox_for_metric_region(const GeoPoint& center, double width_m, double height_m);

// Minimal axis-aligned rectangle of tiles covering the metric bbox.
// Row-major order, north-west first. Throws DomainError for degenerate boxes.
std::vector<TileAddress> tiles_for_bbox(const GeoPoint& center, double width_m, double height_m,
                                        int z);

struct TileFetchOptions {
    int retries = 3;            // additional attempts after the first failure
    int backoff_initial_ms = 100;  // doubles per retry
    int parallelism = 4;
};

// A source of map tiles: either an XYZ URL template with {z}/{x}/{y}
// placeholders or a local directory in z/x/y.<ext> layout.
class TileSource {
public:
    virtual ~TileSource() = default;
    virtual Raster fetch(const TileAddress& addr) = 0;
    virtual std::string describe() const = 0;
};

// Picks the source type from the spec string: anything containing "://" is
// treated as a URL template, otherwise as a directory path.
std::unique_ptr<TileSource> open_tile_source(const std::string& spec,
                                             const TileFetchOptions& opts = {});

Raster fetch_tile(TileSource& source, const TileAddress& addr);

// Fetches a batch with bounded parallelism; result order matches input order.
std::map<TileAddress, Raster> fetch_tiles(const std::string& source_spec,
                                          const std::vector<TileAddress>& addrs,
                                          const TileFetchOptions& opts = {});

struct StitchOptions {
    Modality modality = Modality::EO;
    std::string source_descriptor;
};

// Mosaics tiles and crops to bbox (snapped outward to the zoom-z pixel grid);
// the local frame is anchored at the bbox center. Throws IncompleteCoverage
// listing any missing tile addresses.
ReferenceMap stitch(const std::map<TileAddress, Raster>& tiles, int z,
                    const MercatorRect& bbox, const StitchOptions& opts = {});

}  // namespace gsim
