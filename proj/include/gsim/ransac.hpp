#pragma once

#include "gsim/camera.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gsim {

struct RansacConfig {
    double reproj_threshold = 3.0;  // px, symmetric transfer error
    int max_iters = 2000;
    double confidence = 0.999;
    std::uint64_t seed = 1;
};

struct RansacResult {
    Homography h;  // maps first points of the pairs to the second
    std::vector<char> inlier_mask;
    int inlier_count = 0;
    int iterations = 0;
};

// Robust homography fit by minimal-sample consensus with a least-squares
// refit on the final inlier set. Inliers satisfy
// sqrt(|H a - b|^2 + |H^-1 b - a|^2) <= reproj_threshold. Throws
// RegistrationFailed when no model reaches 4 inliers.
RansacResult ransac_homography(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& matches,
                               const RansacConfig& cfg = {});

}  // namespace gsim
