#include "gsim/camera.hpp"

#include "gsim/errors.hpp"

#include <cmath>

namespace gsim {

void validate_intrinsics(const CameraIntrinsics& k) {
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw DomainError("focal lengths must be positive");
    if (k.width < 2 || k.height < 2) throw DomainError("sensor must be at least 2x2 pixels");
    if (!(k.cx > 0.0) || !(k.cx < k.width) || !(k.cy > 0.0) || !(k.cy < k.height)) {
        throw DomainError("principal point must lie inside the sensor");
    }
}

Homography normalize_homography(const Eigen::Matrix3d& m) {
    Eigen::Matrix3d h = m;
    const double frob = h.norm();
    if (!(frob > 0.0) || !std::isfinite(frob)) {
        throw DegenerateHomography("homography has non-finite or zero entries");
    }
    if (std::abs(h(2, 2)) > 1e-9 * frob) {
        h /= h(2, 2);
    } else {
        h /= frob;
    }
    if (!(std::abs(h.determinant()) > 1e-12)) {
        throw DegenerateHomography("homography is singular after normalization");
    }
    return Homography{h};
}

Homography Homography::inverse() const {
    if (!(std::abs(h.determinant()) > 1e-12)) {
        throw DegenerateHomography("cannot invert a singular homography");
    }
    return normalize_homography(h.inverse());
}

std::array<Eigen::Vector2d, 4> sensor_corner_pixels(const CameraIntrinsics& k) {
    const double w = k.width - 1.0;
    const double h = k.height - 1.0;
    return {Eigen::Vector2d{0.0, 0.0}, Eigen::Vector2d{w, 0.0}, Eigen::Vector2d{w, h},
            Eigen::Vector2d{0.0, h}};
}

Ray ray_through_pixel(const CameraIntrinsics& k, const Pose& pose, double u, double v) {
    const Eigen::Vector3d cam_dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    Ray ray;
    ray.origin = pose.position;
    ray.direction = (pose.orientation * cam_dir).normalized();
    return ray;
}

std::optional<Eigen::Vector3d> intersect_ground(const Ray& ray) {
    if (ray.direction.z() >= -1e-12) return std::nullopt;
    const double t = -ray.origin.z() / ray.direction.z();
    if (!(t > 0.0)) return std::nullopt;
    Eigen::Vector3d p = ray.origin + t * ray.direction;
    p.z() = 0.0;
    return p;
}

std::optional<Footprint> compute_footprint(const CameraIntrinsics& k, const Pose& pose,
                                           const ReferenceMap& map) {
    validate_intrinsics(k);
    Footprint fp;
    const auto corners = sensor_corner_pixels(k);
    for (int i = 0; i < 4; ++i) {
        const Ray ray = ray_through_pixel(k, pose, corners[i].x(), corners[i].y());
        const auto hit = intersect_ground(ray);
        if (!hit) return std::nullopt;
        fp.world_corners[i] = *hit;
        double u = 0.0, v = 0.0;
        map.local_to_pixel(LocalPoint{hit->x(), hit->y(), 0.0}, u, v);
        if (!map.contains_pixel(u, v)) return std::nullopt;
        fp.ref_corners[i] = {u, v};
    }
    return fp;
}

namespace {

// Hartley-style normalization: centroid at origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());
    double mean_dist = 0.0;
    for (const auto& p : pts) mean_dist += (p - centroid).norm();
    mean_dist /= static_cast<double>(pts.size());
    const double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 0) = s;
    t(1, 1) = s;
    t(0, 2) = -s * centroid.x();
    t(1, 2) = -s * centroid.y();
    return t;
}

Homography solve_exact_four(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs) {
    // Eight unknowns h11..h32 with h33 = 1; two equations per correspondence.
    Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double x = pairs[i].first.x(), y = pairs[i].first.y();
        const double u = pairs[i].second.x(), v = pairs[i].second.y();
        a(2 * i, 0) = x;
        a(2 * i, 1) = y;
        a(2 * i, 2) = 1.0;
        a(2 * i, 6) = -u * x;
        a(2 * i, 7) = -u * y;
        b(2 * i) = u;
        a(2 * i + 1, 3) = x;
        a(2 * i + 1, 4) = y;
        a(2 * i + 1, 5) = 1.0;
        a(2 * i + 1, 6) = -v * x;
        a(2 * i + 1, 7) = -v * y;
        b(2 * i + 1) = v;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
    lu.setThreshold(1e-9);
    if (!lu.isInvertible()) {
        throw DegenerateCorrespondences("four-point system is rank deficient");
    }
    const Eigen::Matrix<double, 8, 1> hvec = lu.solve(b);
    Eigen::Matrix3d h;
    h << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), 1.0;
    return normalize_homography(h);
}

Homography solve_dlt(const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs) {
    std::vector<Eigen::Vector2d> src, dst;
    src.reserve(pairs.size());
    dst.reserve(pairs.size());
    for (const auto& pr : pairs) {
        src.push_back(pr.first);
        dst.push_back(pr.second);
    }
    const Eigen::Matrix3d ts = normalizing_transform(src);
    const Eigen::Matrix3d td = normalizing_transform(dst);

    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd a(2 * n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x(), src[i].y(), 1.0);
        const Eigen::Vector3d q = td * Eigen::Vector3d(dst[i].x(), dst[i].y(), 1.0);
        const double x = p.x(), y = p.y();
        const double u = q.x(), v = q.y();
        a.row(2 * i) << x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, -u;
        a.row(2 * i + 1) << 0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, -v;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // With 8 degrees of freedom, a non-degenerate configuration leaves
    // exactly one near-zero singular value.
    if (sv(7) < 1e-9 * sv(0)) {
        throw DegenerateCorrespondences("correspondence set is rank deficient");
    }
    const Eigen::Matrix<double, 9, 1> hvec = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
    const Eigen::Matrix3d h = td.inverse() * hn * ts;
    return normalize_homography(h);
}

}  // namespace

Homography homography_from_correspondences(
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs) {
    if (pairs.size() < 4) {
        throw DegenerateCorrespondences("need at least 4 correspondences, got " +
                                        std::to_string(pairs.size()));
    }
    if (pairs.size() == 4) return solve_exact_four(pairs);
    return solve_dlt(pairs);
}

Raster warp_reference_to_sensor(const ReferenceMap& map, const Homography& h,
                                const CameraIntrinsics& k) {
    validate_intrinsics(k);
    const Homography hinv = h.inverse();
    const Raster& ref = map.raster;
    Raster out(k.width, k.height, ref.bands);
    const double umax = ref.width - 1.0;
    const double vmax = ref.height - 1.0;
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            const Eigen::Vector2d src = hinv.apply({static_cast<double>(u), static_cast<double>(v)});
            if (!(src.x() >= 0.0) || !(src.y() >= 0.0) || !(src.x() <= umax) ||
                !(src.y() <= vmax)) {
                continue;  // guarded: cannot occur when the footprint check passed
            }
            for (int b = 0; b < ref.bands; ++b) {
                out.at(u, v, b) = static_cast<std::uint8_t>(
                    std::lround(sample_bilinear(ref, src.x(), src.y(), b)));
            }
        }
    }
    return out;
}

std::optional<SimulatedFrame> simulate_frame(const ReferenceMap& map, const CameraIntrinsics& k,
                                             const Pose& pose) {
    const auto fp = compute_footprint(k, pose, map);
    if (!fp) return std::nullopt;
    const auto corners = sensor_corner_pixels(k);
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs;
    pairs.reserve(4);
    for (int i = 0; i < 4; ++i) pairs.emplace_back(fp->ref_corners[i], corners[i]);
    SimulatedFrame frame;
    frame.footprint = *fp;
    frame.homography = homography_from_correspondences(pairs);
    frame.image = warp_reference_to_sensor(map, frame.homography, k);
    return frame;
}

}  // namespace gsim
