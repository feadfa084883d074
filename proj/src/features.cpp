#include "gsim/features.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace gsim {

namespace {

// Bresenham circle of radius 3 used by the segment test, clockwise from 12
// o'clock.
constexpr int kCircle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},
                                {2, 2},  {1, 3},  {0, 3},  {-1, 3}, {-2, 2}, {-3, 1},
                                {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};
constexpr int kArcLength = 9;  // FAST-9
constexpr int kPatchRadius = 15;
// Rotated test points reach 13*sqrt(2) px from the center plus the 5x5
// smoothing box, so keep everything at least 22 px inside the image.
constexpr int kBorder = 22;

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> px;
    std::vector<std::uint32_t> integral;  // (width+1) x (height+1)

    std::uint8_t at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }

    void build_integral() {
        integral.assign(static_cast<std::size_t>(width + 1) * (height + 1), 0);
        for (int y = 0; y < height; ++y) {
            std::uint32_t row = 0;
            for (int x = 0; x < width; ++x) {
                row += at(x, y);
                integral[static_cast<std::size_t>(y + 1) * (width + 1) + x + 1] =
                    integral[static_cast<std::size_t>(y) * (width + 1) + x + 1] + row;
            }
        }
    }

    // Mean over the 5x5 box centered at (x, y); callers keep the box inside.
    double box_mean5(int x, int y) const {
        const int x0 = x - 2, y0 = y - 2, x1 = x + 3, y1 = y + 3;
        const std::size_t w1 = width + 1;
        const double sum = static_cast<double>(integral[static_cast<std::size_t>(y1) * w1 + x1]) -
                           integral[static_cast<std::size_t>(y0) * w1 + x1] -
                           integral[static_cast<std::size_t>(y1) * w1 + x0] +
                           integral[static_cast<std::size_t>(y0) * w1 + x0];
        return sum / 25.0;
    }
};

GrayImage make_gray(const Raster& r) {
    const Raster g = to_grayscale(r);
    GrayImage img;
    img.width = g.width;
    img.height = g.height;
    img.px = g.samples;
    img.build_integral();
    return img;
}

GrayImage downscale(const GrayImage& src, double inv_scale) {
    GrayImage out;
    out.width = std::max(1, static_cast<int>(std::lround(src.width * inv_scale)));
    out.height = std::max(1, static_cast<int>(std::lround(src.height * inv_scale)));
    out.px.resize(static_cast<std::size_t>(out.width) * out.height);
    const double sx = static_cast<double>(src.width) / out.width;
    const double sy = static_cast<double>(src.height) / out.height;
    for (int y = 0; y < out.height; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::min(std::max(fy, 0.0), src.height - 1.0);
        const int y0 = std::min(static_cast<int>(fy), src.height - 2);
        const double ty = fy - y0;
        for (int x = 0; x < out.width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::min(std::max(fx, 0.0), src.width - 1.0);
            const int x0 = std::min(static_cast<int>(fx), src.width - 2);
            const double tx = fx - x0;
            const double v = src.at(x0, y0) * (1 - tx) * (1 - ty) +
                             src.at(x0 + 1, y0) * tx * (1 - ty) +
                             src.at(x0, y0 + 1) * (1 - tx) * ty +
                             src.at(x0 + 1, y0 + 1) * tx * ty;
            out.px[static_cast<std::size_t>(y) * out.width + x] =
                static_cast<std::uint8_t>(std::lround(v));
        }
    }
    out.build_integral();
    return out;
}

bool fast_corner(const GrayImage& img, int x, int y, int threshold) {
    const int center = img.at(x, y);
    const int hi = center + threshold;
    const int lo = center - threshold;
    int ring[32];
    for (int i = 0; i < 16; ++i) {
        ring[i] = img.at(x + kCircle[i][0], y + kCircle[i][1]);
        ring[i + 16] = ring[i];
    }
    int run_hi = 0, run_lo = 0;
    for (int i = 0; i < 32; ++i) {
        run_hi = ring[i] > hi ? run_hi + 1 : 0;
        run_lo = ring[i] < lo ? run_lo + 1 : 0;
        if (run_hi >= kArcLength || run_lo >= kArcLength) return true;
    }
    return false;
}

// Harris response over a 7x7 window of Sobel gradients.
double harris_response(const GrayImage& img, int x, int y) {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
            const int px = x + dx, py = y + dy;
            const double gx = (img.at(px + 1, py - 1) + 2.0 * img.at(px + 1, py) +
                               img.at(px + 1, py + 1)) -
                              (img.at(px - 1, py - 1) + 2.0 * img.at(px - 1, py) +
                               img.at(px - 1, py + 1));
            const double gy = (img.at(px - 1, py + 1) + 2.0 * img.at(px, py + 1) +
                               img.at(px + 1, py + 1)) -
                              (img.at(px - 1, py - 1) + 2.0 * img.at(px, py - 1) +
                               img.at(px + 1, py - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    const double det = sxx * syy - sxy * sxy;
    const double trace = sxx + syy;
    return det - 0.04 * trace * trace;
}

double intensity_centroid_angle(const GrayImage& img, int x, int y) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
        const int max_dx = static_cast<int>(
            std::floor(std::sqrt(static_cast<double>(kPatchRadius * kPatchRadius - dy * dy))));
        for (int dx = -max_dx; dx <= max_dx; ++dx) {
            const double val = img.at(x + dx, y + dy);
            m10 += dx * val;
            m01 += dy * val;
        }
    }
    if (m10 == 0.0 && m01 == 0.0) return 0.0;
    return std::atan2(m01, m10);
}

struct TestPattern {
    // 256 point pairs inside the +-13 px patch.
    std::array<std::array<float, 4>, 256> pairs;
};

TestPattern make_pattern(std::uint64_t seed) {
    TestPattern pattern;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 31.0 / 5.0);
    auto draw = [&]() {
        double v;
        do {
            v = gauss(rng);
        } while (std::abs(v) > 13.0);
        return static_cast<float>(v);
    };
    for (auto& p : pattern.pairs) {
        p = {draw(), draw(), draw(), draw()};
    }
    return pattern;
}

BinaryDescriptor describe(const GrayImage& img, const TestPattern& pattern, int x, int y,
                          double angle) {
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    BinaryDescriptor d;
    for (int i = 0; i < 256; ++i) {
        const auto& p = pattern.pairs[i];
        const int x1 = x + static_cast<int>(std::lround(ca * p[0] - sa * p[1]));
        const int y1 = y + static_cast<int>(std::lround(sa * p[0] + ca * p[1]));
        const int x2 = x + static_cast<int>(std::lround(ca * p[2] - sa * p[3]));
        const int y2 = y + static_cast<int>(std::lround(sa * p[2] + ca * p[3]));
        if (img.box_mean5(x1, y1) < img.box_mean5(x2, y2)) {
            d.bits[i >> 6] |= (1ULL << (i & 63));
        }
    }
    return d;
}

}  // namespace

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b) {
    int dist = 0;
    for (int i = 0; i < 4; ++i) dist += std::popcount(a.bits[i] ^ b.bits[i]);
    return dist;
}

std::vector<std::pair<Keypoint, BinaryDescriptor>> detect_and_describe(const Raster& image,
                                                                       int max_features,
                                                                       const FeatureConfig& cfg) {
    if (image.width < 32 || image.height < 32) {
        throw DomainError("feature detection requires at least a 32x32 image");
    }
    if (max_features < 1) throw DomainError("max_features must be >= 1");
    const TestPattern pattern = make_pattern(cfg.pattern_seed);
    const int levels = std::min(3, std::max(1, cfg.n_levels));

    struct Candidate {
        Keypoint kp;
        int lx = 0, ly = 0;  // integer position at its own level
    };
    std::vector<Candidate> candidates;
    std::vector<GrayImage> pyramid;
    pyramid.push_back(make_gray(image));
    double level_scale = 1.0;
    for (int level = 0; level < levels; ++level) {
        if (level > 0) {
            level_scale *= cfg.scale_factor;
            const GrayImage& base = pyramid[0];
            if (base.width / level_scale < 2 * kBorder + 8 ||
                base.height / level_scale < 2 * kBorder + 8) {
                break;
            }
            pyramid.push_back(downscale(base, 1.0 / level_scale));
        }
        const GrayImage& img = pyramid[level];

        // FAST detection with 3x3 non-max suppression on the Harris score.
        std::vector<double> score(static_cast<std::size_t>(img.width) * img.height, 0.0);
        for (int y = kBorder; y < img.height - kBorder; ++y) {
            for (int x = kBorder; x < img.width - kBorder; ++x) {
                if (fast_corner(img, x, y, cfg.fast_threshold)) {
                    score[static_cast<std::size_t>(y) * img.width + x] = harris_response(img, x, y);
                }
            }
        }
        for (int y = kBorder; y < img.height - kBorder; ++y) {
            for (int x = kBorder; x < img.width - kBorder; ++x) {
                const double s = score[static_cast<std::size_t>(y) * img.width + x];
                if (s <= 0.0) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const double n = score[static_cast<std::size_t>(y + dy) * img.width + x + dx];
                        if (n > s || (n == s && (dy < 0 || (dy == 0 && dx < 0)))) {
                            is_max = false;
                            break;
                        }
                    }
                }
                if (!is_max) continue;
                Candidate c;
                c.kp.u = x * level_scale;
                c.kp.v = y * level_scale;
                c.kp.response = s;
                c.kp.level = level;
                c.kp.orientation = intensity_centroid_angle(img, x, y);
                c.lx = x;
                c.ly = y;
                candidates.push_back(c);
            }
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         return a.kp.response > b.kp.response;
                     });
    if (static_cast<int>(candidates.size()) > max_features) {
        candidates.resize(static_cast<std::size_t>(max_features));
    }

    std::vector<std::pair<Keypoint, BinaryDescriptor>> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.emplace_back(c.kp,
                         describe(pyramid[c.kp.level], pattern, c.lx, c.ly, c.kp.orientation));
    }
    return out;
}

std::vector<std::pair<int, int>> match_features(
    const std::vector<std::pair<Keypoint, BinaryDescriptor>>& a,
    const std::vector<std::pair<Keypoint, BinaryDescriptor>>& b, double ratio) {
    std::vector<std::pair<int, int>> matches;
    if (a.empty() || b.empty()) return matches;

    // Best match in b for each a, with the ratio test.
    std::vector<int> best_b(a.size(), -1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        int best = 1 << 30, second = 1 << 30, best_j = -1;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const int d = hamming_distance(a[i].second, b[j].second);
            if (d < best) {
                second = best;
                best = d;
                best_j = static_cast<int>(j);
            } else if (d < second) {
                second = d;
            }
        }
        if (best_j >= 0 && best < ratio * second) best_b[i] = best_j;
    }
    // Best match in a for each b (no ratio needed for the mutual check).
    std::vector<int> best_a(b.size(), -1);
    for (std::size_t j = 0; j < b.size(); ++j) {
        int best = 1 << 30, best_i = -1;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const int d = hamming_distance(a[i].second, b[j].second);
            if (d < best) {
                best = d;
                best_i = static_cast<int>(i);
            }
        }
        best_a[j] = best_i;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int j = best_b[i];
        if (j >= 0 && best_a[j] == static_cast<int>(i)) {
            matches.emplace_back(static_cast<int>(i), j);
        }
    }
    return matches;
}

}  // namespace gsim
