#include "gsim/tiles.hpp"

#include "gsim/errors.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace gsim {

namespace fs = std::filesystem;

std::string TileAddress::to_string() const {
    return std::to_string(z) + "/" + std::to_string(x) + "/" + std::to_string(y);
}

double tile_extent(int z) { return 2.0 * kMercatorHalfExtent / static_cast<double>(1 << z); }

double tile_pixel_size(int z) { return tile_extent(z) / kTileSize; }

MercatorRect tile_bounds(const TileAddress& addr) {
    const double ext = tile_extent(addr.z);
    MercatorRect r;
    r.min_x = -kMercatorHalfExtent + addr.x * ext;
    r.max_x = r.min_x + ext;
    r.max_y = kMercatorHalfExtent - addr.y * ext;
    r.min_y = r.max_y - ext;
    return r;
}

TileAddress tile_for_geo(const GeoPoint& p, int z) {
    if (z < 0 || z > 30) throw DomainError("zoom level out of range");
    if (!(std::abs(p.lat) <= kMercatorMaxLat)) {
        throw DomainError("latitude outside Web Mercator bounds");
    }
    const double n = static_cast<double>(1 << z);
    const double phi = degrees_to_radians(p.lat);
    int x = static_cast<int>(std::floor((p.lon + 180.0) / 360.0 * n));
    int y = static_cast<int>(
        std::floor((1.0 - std::log(std::tan(phi) + 1.0 / std::cos(phi)) / 3.14159265358979323846) /
                   2.0 * n));
    // lon = 180 / lat at the south limit land exactly on the upper bound.
    if (x >= static_cast<int>(n)) x = static_cast<int>(n) - 1;
    if (y >= static_cast<int>(n)) y = static_cast<int>(n) - 1;
    if (x < 0) x = 0;
    if (y < 0) y = 0;
    return {z, x, y};
}

MercatorRect bbox_for_metric_region(const GeoPoint& center, double width_m, double height_m) {
    if (!(width_m > 0.0) || !(height_m > 0.0)) {
        throw DomainError("metric region dimensions must be positive");
    }
    const MercatorPoint c = wgs84_to_webmercator(center);
    const double scale = std::cos(degrees_to_radians(center.lat));  // ground m per Mercator m
    const double half_w = 0.5 * width_m / scale;
    const double half_h = 0.5 * height_m / scale;
    return {c.x - half_w, c.y - half_h, c.x + half_w, c.y + half_h};
}

std::vector<TileAddress> tiles_for_bbox(const GeoPoint& center, double width_m, double height_m,
                                        int z) {
    const MercatorRect bbox = bbox_for_metric_region(center, width_m, height_m);
    const double ext = tile_extent(z);
    const int n = 1 << z;
    auto clamp_tile = [n](int t) { return std::max(0, std::min(n - 1, t)); };
    const int x0 = clamp_tile(static_cast<int>(std::floor((bbox.min_x + kMercatorHalfExtent) / ext)));
    const int x1 = clamp_tile(static_cast<int>(std::floor((bbox.max_x + kMercatorHalfExtent) / ext)));
    const int y0 = clamp_tile(static_cast<int>(std::floor((kMercatorHalfExtent - bbox.max_y) / ext)));
    const int y1 = clamp_tile(static_cast<int>(std::floor((kMercatorHalfExtent - bbox.min_y) / ext)));
    std::vector<TileAddress> out;
    out.reserve(static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) out.push_back({z, x, y});
    }
    return out;
}

namespace {

class DirectoryTileSource : public TileSource {
public:
    explicit DirectoryTileSource(std::string root) : root_(std::move(root)) {
        if (!fs::is_directory(root_)) {
            throw SourceUnavailable("tile directory does not exist: " + root_);
        }
    }

    Raster fetch(const TileAddress& addr) override {
        static const char* exts[] = {".png", ".ppm", ".pgm"};
        for (const char* ext : exts) {
            const fs::path p = fs::path(root_) / std::to_string(addr.z) /
                               std::to_string(addr.x) / (std::to_string(addr.y) + ext);
            if (fs::exists(p)) {
                std::ifstream in(p, std::ios::binary);
                if (!in) throw IoError("cannot open tile " + p.string());
                std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                                std::istreambuf_iterator<char>());
                return decode_image(bytes, p.string());
            }
        }
        throw MissingTile("no tile " + addr.to_string() + " under " + root_);
    }

    std::string describe() const override { return "dir:" + root_; }

private:
    std::string root_;
};

class HttpTileSource : public TileSource {
public:
    HttpTileSource(std::string url_template, TileFetchOptions opts)
        : template_(std::move(url_template)), opts_(opts) {
        const auto scheme_end = template_.find("://");
        const auto path_start = template_.find('/', scheme_end + 3);
        if (scheme_end == std::string::npos || path_start == std::string::npos) {
            throw DomainError("malformed tile URL template: " + template_);
        }
        host_ = template_.substr(0, path_start);
        path_template_ = template_.substr(path_start);
        if (path_template_.find("{z}") == std::string::npos ||
            path_template_.find("{x}") == std::string::npos ||
            path_template_.find("{y}") == std::string::npos) {
            throw DomainError("tile URL template must contain {z},{x},{y}: " + template_);
        }
    }

    Raster fetch(const TileAddress& addr) override {
        const std::string path = expand(path_template_, addr);
        int backoff_ms = opts_.backoff_initial_ms;
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
                backoff_ms *= 2;
            }
            httplib::Client client(host_);
            client.set_connection_timeout(5, 0);
            client.set_read_timeout(10, 0);
            auto res = client.Get(path);
            if (!res) {
                last_error = "connection error " + httplib::to_string(res.error());
                continue;  // transient
            }
            if (res->status == 404) {
                throw MissingTile("HTTP 404 for " + host_ + path);
            }
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;  // transient
            }
            if (res->status != 200) {
                throw SourceUnavailable("HTTP " + std::to_string(res->status) + " for " + host_ +
                                        path);
            }
            std::vector<std::uint8_t> bytes(res->body.begin(), res->body.end());
            return decode_image(bytes, host_ + path);
        }
        throw SourceUnavailable("tile " + addr.to_string() + " from " + host_ +
                                " failed after retries: " + last_error);
    }

    std::string describe() const override { return template_; }

private:
    static std::string expand(std::string s, const TileAddress& addr) {
        auto replace = [&s](const std::string& key, int value) {
            const auto pos = s.find(key);
            if (pos != std::string::npos) s.replace(pos, key.size(), std::to_string(value));
        };
        replace("{z}", addr.z);
        replace("{x}", addr.x);
        replace("{y}", addr.y);
        return s;
    }

    std::string template_;
    std::string host_;
    std::string path_template_;
    TileFetchOptions opts_;
};

}  // namespace

std::unique_ptr<TileSource> open_tile_source(const std::string& spec,
                                             const TileFetchOptions& opts) {
    if (spec.find("://") != std::string::npos) {
        return std::make_unique<HttpTileSource>(spec, opts);
    }
    return std::make_unique<DirectoryTileSource>(spec);
}

Raster fetch_tile(TileSource& source, const TileAddress& addr) {
    Raster tile = source.fetch(addr);
    if (tile.width != kTileSize || tile.height != kTileSize) {
        throw CorruptTile("tile " + addr.to_string() + " is " + std::to_string(tile.width) + "x" +
                          std::to_string(tile.height) + ", expected " +
                          std::to_string(kTileSize));
    }
    return tile;
}

std::map<TileAddress, Raster> fetch_tiles(const std::string& source_spec,
                                          const std::vector<TileAddress>& addrs,
                                          const TileFetchOptions& opts) {
    const int workers =
        std::max(1, std::min<int>(opts.parallelism, static_cast<int>(addrs.size())));
    std::vector<Raster> results(addrs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        // Each worker holds its own client; sources are cheap to open.
        std::unique_ptr<TileSource> source;
        try {
            source = open_tile_source(source_spec, opts);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
        }
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= addrs.size()) break;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) break;
            }
            try {
                results[i] = fetch_tile(*source, addrs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::map<TileAddress, Raster> out;
    for (std::size_t i = 0; i < addrs.size(); ++i) out[addrs[i]] = std::move(results[i]);
    return out;
}

ReferenceMap stitch(const std::map<TileAddress, Raster>& tiles, int z, const MercatorRect& bbox,
                    const StitchOptions& opts) {
    if (tiles.empty()) throw IncompleteCoverage("no tiles supplied");
    if (!(bbox.width() > 0.0) || !(bbox.height() > 0.0)) {
        throw DomainError("stitch bbox is degenerate");
    }
    const double px = tile_pixel_size(z);

    // Snap the bbox outward to the global zoom-z pixel grid so output pixels
    // are direct copies of tile pixels.
    const long col0 = static_cast<long>(std::floor((bbox.min_x + kMercatorHalfExtent) / px));
    const long col1 = static_cast<long>(std::ceil((bbox.max_x + kMercatorHalfExtent) / px));
    const long row0 = static_cast<long>(std::floor((kMercatorHalfExtent - bbox.max_y) / px));
    const long row1 = static_cast<long>(std::ceil((kMercatorHalfExtent - bbox.min_y) / px));
    const int width = static_cast<int>(col1 - col0);
    const int height = static_cast<int>(row1 - row0);
    if (width < 1 || height < 1) throw DomainError("stitch bbox smaller than one pixel");

    const int bands = tiles.begin()->second.bands;
    std::vector<TileAddress> missing;
    Raster out(width, height, bands);

    // Walk covered tiles instead of pixels so each tile is looked up once.
    const int tx0 = static_cast<int>(col0 / kTileSize) - (col0 % kTileSize < 0 ? 1 : 0);
    const int tx1 = static_cast<int>((col1 - 1) / kTileSize);
    const int ty0 = static_cast<int>(row0 / kTileSize) - (row0 % kTileSize < 0 ? 1 : 0);
    const int ty1 = static_cast<int>((row1 - 1) / kTileSize);
    for (int ty = ty0; ty <= ty1; ++ty) {
        for (int tx = tx0; tx <= tx1; ++tx) {
            const TileAddress addr{z, tx, ty};
            const auto it = tiles.find(addr);
            if (it == tiles.end()) {
                missing.push_back(addr);
                continue;
            }
            const Raster& tile = it->second;
            if (tile.bands != bands) {
                throw DomainError("tile " + addr.to_string() + " band count differs from mosaic");
            }
            // Intersection of this tile with the output window, in global pixels.
            const long gx0 = std::max<long>(col0, static_cast<long>(tx) * kTileSize);
            const long gx1 = std::min<long>(col1, static_cast<long>(tx + 1) * kTileSize);
            const long gy0 = std::max<long>(row0, static_cast<long>(ty) * kTileSize);
            const long gy1 = std::min<long>(row1, static_cast<long>(ty + 1) * kTileSize);
            for (long gy = gy0; gy < gy1; ++gy) {
                const int sv = static_cast<int>(gy - static_cast<long>(ty) * kTileSize);
                const int dv = static_cast<int>(gy - row0);
                const std::uint8_t* src = tile.samples.data() +
                                          tile.index(static_cast<int>(gx0 - static_cast<long>(tx) * kTileSize), sv, 0);
                std::uint8_t* dst = out.samples.data() + out.index(static_cast<int>(gx0 - col0), dv, 0);
                std::copy(src, src + static_cast<std::size_t>(gx1 - gx0) * bands, dst);
            }
        }
    }
    if (!missing.empty()) {
        std::string detail = "stitch coverage gap, missing tiles:";
        for (const auto& m : missing) detail += " " + m.to_string();
        throw IncompleteCoverage(detail);
    }

    GeoTransform gt;
    gt.origin.x = -kMercatorHalfExtent + col0 * px;
    gt.origin.y = kMercatorHalfExtent - row0 * px;
    gt.pixel_size_x = px;
    gt.pixel_size_y = px;

    const MercatorPoint center{0.5 * (bbox.min_x + bbox.max_x), 0.5 * (bbox.min_y + bbox.max_y)};
    const LocalFrame frame = make_local_frame(webmercator_to_wgs84(center));
    return make_reference_map(std::move(out), gt, frame, opts.modality, opts.source_descriptor);
}

}  // namespace gsim
