#include "gsim/ransac.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gsim {

namespace {

bool three_collinear(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
    const Eigen::Vector2d ab = b - a;
    const Eigen::Vector2d ac = c - a;
    const double cross = ab.x() * ac.y() - ab.y() * ac.x();
    const double scale = ab.norm() * ac.norm();
    return std::abs(cross) <= 1e-9 * std::max(scale, 1.0);
}

bool sample_degenerate(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& matches,
                       const int idx[4]) {
    for (int skip = 0; skip < 4; ++skip) {
        Eigen::Vector2d pts[3];
        int n = 0;
        for (int i = 0; i < 4; ++i) {
            if (i != skip) pts[n++] = matches[idx[i]].first;
        }
        if (three_collinear(pts[0], pts[1], pts[2])) return true;
    }
    return false;
}

double symmetric_transfer_error(const Homography& h, const Homography& hinv,
                                const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const double fwd = (h.apply(a) - b).squaredNorm();
    const double bwd = (hinv.apply(b) - a).squaredNorm();
    return std::sqrt(fwd + bwd);
}

int count_inliers(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& matches,
                  const Homography& h, double threshold, std::vector<char>& mask) {
    Homography hinv;
    try {
        hinv = h.inverse();
    } catch (const DegenerateHomography&) {
        std::fill(mask.begin(), mask.end(), 0);
        return 0;
    }
    int count = 0;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const double err =
            symmetric_transfer_error(h, hinv, matches[i].first, matches[i].second);
        mask[i] = err <= threshold ? 1 : 0;
        count += mask[i];
    }
    return count;
}

}  // namespace

RansacResult ransac_homography(
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& matches,
    const RansacConfig& cfg) {
    const auto n = matches.size();
    if (n < 4) {
        throw RegistrationFailed("RANSAC needs at least 4 matches, got " + std::to_string(n));
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    Homography best_h;
    std::vector<char> best_mask(n, 0);
    int best_count = 0;
    int iter_bound = cfg.max_iters;
    int iter = 0;
    for (; iter < iter_bound; ++iter) {
        int idx[4];
        for (int k = 0; k < 4;) {
            const auto candidate = static_cast<int>(pick(rng));
            bool duplicate = false;
            for (int j = 0; j < k; ++j) duplicate |= (idx[j] == candidate);
            if (!duplicate) idx[k++] = candidate;
        }
        if (sample_degenerate(matches, idx)) continue;

        std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> sample;
        sample.reserve(4);
        for (int k = 0; k < 4; ++k) sample.push_back(matches[idx[k]]);
        Homography h;
        try {
            h = homography_from_correspondences(sample);
        } catch (const DomainError&) {
            continue;
        }
        std::vector<char> mask(n, 0);
        const int count = count_inliers(matches, h, cfg.reproj_threshold, mask);
        if (count > best_count) {
            best_count = count;
            best_h = h;
            best_mask = std::move(mask);
            // Adaptive bound from the current inlier ratio.
            const double w = static_cast<double>(count) / static_cast<double>(n);
            const double p_outlier_free = std::pow(w, 4);
            if (p_outlier_free > 1e-12) {
                const double denom = std::log(std::max(1e-12, 1.0 - p_outlier_free));
                if (denom < 0.0) {
                    const double needed = std::log(1.0 - cfg.confidence) / denom;
                    iter_bound = std::min<int>(cfg.max_iters,
                                               static_cast<int>(std::ceil(needed)) + 1);
                }
            }
        }
    }

    if (best_count < 4) {
        throw RegistrationFailed("RANSAC found no model with >= 4 inliers (best " +
                                 std::to_string(best_count) + " of " + std::to_string(n) + ")");
    }

    // Least-squares refit on the consensus set, then recount.
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> inliers;
    inliers.reserve(static_cast<std::size_t>(best_count));
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask[i]) inliers.push_back(matches[i]);
    }
    RansacResult result;
    try {
        result.h = homography_from_correspondences(inliers);
        result.inlier_mask.assign(n, 0);
        result.inlier_count =
            count_inliers(matches, result.h, cfg.reproj_threshold, result.inlier_mask);
    } catch (const DomainError&) {
        result.h = best_h;  // refit degenerated; keep the consensus model
        result.inlier_mask = best_mask;
        result.inlier_count = best_count;
    }
    if (result.inlier_count < best_count) {
        result.h = best_h;
        result.inlier_mask = best_mask;
        result.inlier_count = best_count;
    }
    result.iterations = iter;
    return result;
}

}  // namespace gsim
