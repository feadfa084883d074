#include "gsim/registration.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Isotropic scale of the (near-affine) transform: ref pixels per sensed pixel.
double transform_scale(const Homography& h) {
    const Eigen::Matrix3d& m = h.h;
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double w = m(2, 2);
    return std::sqrt(std::abs(det / (w * w)));
}

Eigen::Matrix3d translation(double tx, double ty) {
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 2) = tx;
    t(1, 2) = ty;
    return t;
}

Eigen::Matrix3d iso_scale(double s) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = s;
    m(1, 1) = s;
    return m;
}

}  // namespace

RegistrationMethod registration_method_from_name(const std::string& name) {
    if (name == "feature") return RegistrationMethod::Feature;
    if (name == "mi") return RegistrationMethod::MutualInfo;
    throw DomainError("unknown registration method '" + name + "' (expected feature|mi)");
}

std::string registration_method_name(RegistrationMethod m) {
    return m == RegistrationMethod::Feature ? "feature" : "mutual_info";
}

double corner_rms_error(const Homography& h_est, const Homography& h_truth, int width,
                        int height) {
    const double w = width - 1.0;
    const double h = height - 1.0;
    const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
    double sum_sq = 0.0;
    for (const auto& c : corners) {
        sum_sq += (h_est.apply(c) - h_truth.apply(c)).squaredNorm();
    }
    return std::sqrt(sum_sq / 4.0);
}

std::uint64_t frame_seed(std::uint64_t run_seed, std::int64_t frame_id) {
    return splitmix64(run_seed ^ splitmix64(static_cast<std::uint64_t>(frame_id)));
}

Homography truth_sensed_to_ref(const TelemetryRecord& rec) {
    if (rec.suppressed) throw DomainError("suppressed record carries no homography");
    Eigen::Matrix3d h;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) h(r, c) = rec.homography[r * 3 + c];
    return normalize_homography(h).inverse();
}

Homography make_prior(const Homography& truth, double noise_px, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double span = noise_px * transform_scale(truth);
    std::uniform_real_distribution<double> offset(-span, span);
    const double dx = offset(rng);
    const double dy = offset(rng);
    return normalize_homography(translation(dx, dy) * truth.h);
}

RegistrationResult register_frame(const Raster& sensed, const ReferenceMap& reference,
                                  const TelemetryRecord& truth_record, const RegisterConfig& cfg,
                                  std::uint64_t run_seed) {
    RegistrationResult result;
    result.frame_id = truth_record.frame_id;
    result.modality = truth_record.modality;
    result.method = cfg.method;
    result.image_path = truth_record.image_path;
    result.h_truth_ref_to_sensor = truth_record.homography;

    const std::uint64_t seed = frame_seed(run_seed, truth_record.frame_id);
    const Homography truth = truth_sensed_to_ref(truth_record);
    const double s_truth = transform_scale(truth);

    try {
        const Homography prior = make_prior(truth, cfg.prior_noise_px, seed);
        const double s_prior = transform_scale(prior);

        // Region of interest around the prior footprint, in reference pixels.
        const double w1 = sensed.width - 1.0;
        const double h1 = sensed.height - 1.0;
        const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {w1, 0.0}, {w1, h1}, {0.0, h1}};
        double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
        for (const auto& c : corners) {
            const Eigen::Vector2d p = prior.apply(c);
            min_x = std::min(min_x, p.x());
            max_x = std::max(max_x, p.x());
            min_y = std::min(min_y, p.y());
            max_y = std::max(max_y, p.y());
        }
        const double margin = (cfg.roi_margin_sensed_px + cfg.prior_noise_px) * s_prior;
        int x0 = static_cast<int>(std::floor(min_x - margin));
        int y0 = static_cast<int>(std::floor(min_y - margin));
        int x1 = static_cast<int>(std::ceil(max_x + margin));
        int y1 = static_cast<int>(std::ceil(max_y + margin));
        x0 = std::max(0, x0);
        y0 = std::max(0, y0);
        x1 = std::min(reference.raster.width - 1, x1);
        y1 = std::min(reference.raster.height - 1, y1);
        if (x1 - x0 < 32 || y1 - y0 < 32) {
            throw RegistrationFailed("prior footprint leaves no usable reference region");
        }
        const Raster roi = to_grayscale(crop(reference.raster, x0, y0, x1 - x0 + 1, y1 - y0 + 1));
        const Homography prior_roi =
            normalize_homography(translation(-x0, -y0) * prior.h);

        // Bring the reference to roughly sensed resolution so both methods see
        // comparable scales.
        const int factor = s_prior > 1.3 ? std::max(1, static_cast<int>(std::lround(s_prior))) : 1;
        const Raster ref_small = factor > 1 ? box_downsample(roi, factor) : roi;
        const Homography prior_small =
            factor > 1 ? normalize_homography(iso_scale(1.0 / factor) * prior_roi.h) : prior_roi;

        const Raster sensed_gray = to_grayscale(sensed);

        Homography h_small;
        if (cfg.method == RegistrationMethod::Feature) {
            const auto kp_sensed =
                detect_and_describe(sensed_gray, cfg.features.max_features, cfg.features);
            const auto kp_ref =
                detect_and_describe(ref_small, cfg.features.max_features, cfg.features);
            const auto matches = match_features(kp_sensed, kp_ref);
            std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs;
            pairs.reserve(matches.size());
            for (const auto& [i, j] : matches) {
                pairs.emplace_back(Eigen::Vector2d(kp_sensed[i].first.u, kp_sensed[i].first.v),
                                   Eigen::Vector2d(kp_ref[j].first.u, kp_ref[j].first.v));
            }
            RansacConfig rcfg = cfg.ransac;
            rcfg.seed = seed;
            const RansacResult fit = ransac_homography(pairs, rcfg);
            h_small = fit.h;
            result.score = fit.inlier_count;
        } else {
            const MiRegistration fit = mi_register(sensed_gray, ref_small, prior_small, cfg.mi);
            h_small = fit.h;
            result.score = fit.mi_bits;
        }

        // Back to full-reference coordinates.
        Eigen::Matrix3d h_full = translation(x0, y0) * iso_scale(factor) * h_small.h;
        result.h_est = normalize_homography(h_full);
    } catch (const Error& e) {
        result.failed = true;
        result.failure_reason = e.what();
        result.success = false;
        result.corner_rms_ref_px = std::numeric_limits<double>::infinity();
        result.corner_rms_sensed_px = std::numeric_limits<double>::infinity();
        return result;
    }

    result.corner_rms_ref_px = corner_rms_error(result.h_est, truth, sensed.width, sensed.height);
    result.corner_rms_sensed_px = result.corner_rms_ref_px / s_truth;
    result.success = result.corner_rms_sensed_px < cfg.success_threshold_px;
    return result;
}

}  // namespace gsim
