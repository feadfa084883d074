#pragma once

#include "gsim/geodesy.hpp"
#include "gsim/raster.hpp"
#include "gsim/refmap.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace gsim {

// Pinhole model; focal lengths and principal point in pixels.
struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
};

// Throws DomainError when the intrinsics invariants fail.
void validate_intrinsics(const CameraIntrinsics& k);

// Camera pose in the local world frame (east-north-up).
// Camera frame: +Z along the optical axis toward the scene, +X toward
// increasing image u, +Y toward increasing image v. `orientation` maps
// camera-frame vectors into world-frame vectors.
struct Pose {
    Eigen::Vector3d position{0.0, 0.0, 0.0};
    Eigen::Quaterniond orientation{1.0, 0.0, 0.0, 0.0};
};

struct Ray {
    Eigen::Vector3d origin;
    Eigen::Vector3d direction;  // unit
};

// 3x3 projective transform mapping reference-map pixels to sensor pixels.
// Normalized so h(2,2) = 1 (unit Frobenius norm when h(2,2) is ~0).
struct Homography {
    Eigen::Matrix3d h = Eigen::Matrix3d::Identity();

    Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
        const Eigen::Vector3d q = h * Eigen::Vector3d(p.x(), p.y(), 1.0);
        return {q.x() / q.z(), q.y() / q.z()};
    }
    // Throws DegenerateHomography when not invertible.
    Homography inverse() const;
};

// Renormalizes (h22 = 1, or unit Frobenius) and checks invertibility.
Homography normalize_homography(const Eigen::Matrix3d& h);

// Ground footprint of the four sensor corner pixels, order TL, TR, BR, BL
// matching sensor pixels (0,0), (W-1,0), (W-1,H-1), (0,H-1).
struct Footprint {
    std::array<Eigen::Vector3d, 4> world_corners;
    std::array<Eigen::Vector2d, 4> ref_corners;  // reference-map pixel coords
};

// The four sensor corner-pixel coordinates in the order above.
std::array<Eigen::Vector2d, 4> sensor_corner_pixels(const CameraIntrinsics& k);

// World-frame ray through the center of pixel (u, v).
Ray ray_through_pixel(const CameraIntrinsics& k, const Pose& pose, double u, double v);

// Intersection with the z=0 ground plane; empty when the ray is parallel to
// or points away from the plane.
std::optional<Eigen::Vector3d> intersect_ground(const Ray& ray);

// Casts the corner rays and converts hits to reference pixels. Empty when any
// corner misses the plane or exits the raster (frame must be suppressed).
std::optional<Footprint> compute_footprint(const CameraIntrinsics& k, const Pose& pose,
                                           const ReferenceMap& map);

// Solves H mapping ref -> sensor from >= 4 (ref, sensor) point pairs.
// Exactly 4 pairs solve the 8x8 linear system; more use the normalized DLT in
// a least-squares sense. Throws DegenerateCorrespondences on rank deficiency.
Homography homography_from_correspondences(
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs);

// Inverse-maps each sensor pixel through h and samples the reference map
// bilinearly; pixels mapping outside the raster are written as 0.
Raster warp_reference_to_sensor(const ReferenceMap& map, const Homography& h,
                                const CameraIntrinsics& k);

struct SimulatedFrame {
    Raster image;
    Footprint footprint;
    Homography homography;  // ref -> sensor
};

// Full image-formation step; empty when the footprint check suppresses the
// frame.
std::optional<SimulatedFrame> simulate_frame(const ReferenceMap& map, const CameraIntrinsics& k,
                                             const Pose& pose);

}  // namespace gsim
