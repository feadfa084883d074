#pragma once

#include "gsim/refmap.hpp"
#include "gsim/scenario.hpp"
#include "gsim/synthetic.hpp"

#include <cstdint>
#include <string>

namespace gsim::testing {

// Unique scratch directory under the system temp root, wiped on construction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    const std::string& path() const { return path_; }
    std::string sub(const std::string& name) const;

private:
    std::string path_;
};

// Synthetic EO reference map centered at `center`, with a local frame there.
// width/height in pixels, pixel_size in Mercator meters.
ReferenceMap make_synthetic_map(const GeoPoint& center, int width, int height,
                                double pixel_size, std::uint64_t seed, int bands = 3);

// Nominal straight-overflight scenario over a synthetic map. The returned
// scenario references no bundles; pass the map to run_simulation directly.
struct NominalScene {
    ReferenceMap map;
    ScenarioConfig scenario;
};
NominalScene make_nominal_scene(const std::string& output_dir, std::uint64_t seed);

}  // namespace gsim::testing
