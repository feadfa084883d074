#pragma once

#include "gsim/raster.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace gsim {

// Corner keypoint in level-0 pixel coordinates.
struct Keypoint {
    double u = 0.0;
    double v = 0.0;
    double response = 0.0;     // Harris score used for ranking
    double orientation = 0.0;  // intensity-centroid angle, radians
    int level = 0;             // pyramid level the point was detected on
};

// 256-bit binary descriptor from steered pairwise intensity comparisons.
struct BinaryDescriptor {
    std::array<std::uint64_t, 4> bits{};
};

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b);

struct FeatureConfig {
    int max_features = 500;
    int fast_threshold = 18;        // segment-test contrast
    int n_levels = 3;               // pyramid octaves (capped at 3)
    double scale_factor = 1.5;      // per-level downscale
    std::uint64_t pattern_seed = 0x5151b9d3ULL;  // fixes the test-point pattern
};

// FAST-style segment-test corners ranked by Harris response, oriented by the
// patch intensity centroid and described with steered binary tests. RGB input
// is converted by luma. Deterministic for identical input and pattern seed.
// Throws DomainError for images smaller than 32x32.
std::vector<std::pair<Keypoint, BinaryDescriptor>> detect_and_describe(
    const Raster& image, int max_features, const FeatureConfig& cfg = {});

// Mutual nearest neighbors under Hamming distance, filtered by the ratio test
// (best/second-best < ratio). Returns (index in a, index in b) pairs.
std::vector<std::pair<int, int>> match_features(
    const std::vector<std::pair<Keypoint, BinaryDescriptor>>& a,
    const std::vector<std::pair<Keypoint, BinaryDescriptor>>& b, double ratio = 0.8);

}  // namespace gsim
