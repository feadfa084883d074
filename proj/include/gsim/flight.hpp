#pragma once

#include "gsim/camera.hpp"

#include <Eigen/Geometry>

#include <vector>

namespace gsim {

inline constexpr double kGravity = 9.80665;  // m/s^2

struct Waypoint {
    Eigen::Vector3d position{0.0, 0.0, 0.0};  // z = commanded altitude
    double capture_radius = 50.0;             // meters, horizontal
};

// Coordinated-turn kinematic vehicle. Heading rate follows
// psi_dot = g * tan(roll) / V; roll is commanded proportionally toward the
// bearing of the active waypoint, slew-limited and clamped.
struct VehicleConfig {
    double airspeed = 25.0;                   // m/s, constant
    double max_roll = 0.5235987755982988;     // rad (30 deg)
    double roll_rate_limit = 1.0471975511965976;  // rad/s (60 deg/s)
    double max_climb_rate = 5.0;              // m/s
    double roll_gain = 1.5;                   // rad of roll cmd per rad of heading error
    double climb_gain = 1.0;                  // 1/s toward commanded altitude
    Eigen::Quaterniond sensor_mount = nadir_mount();  // camera frame -> body frame

    // Body frame is forward-right-down. The nadir mount points the optical
    // axis at body-down with image u along body-right.
    static Eigen::Quaterniond nadir_mount() {
        return Eigen::Quaterniond(Eigen::AngleAxisd(1.5707963267948966, Eigen::Vector3d::UnitZ()));
    }
};

struct TrajectorySample {
    double t = 0.0;
    Pose pose;         // body -> world (east-north-up)
    Pose camera_pose;  // body pose composed with the sensor mount
    double heading = 0.0;      // rad, 0 = north, positive toward east
    double roll = 0.0;         // rad, positive = right wing down
    double pitch = 0.0;        // rad, flight-path angle
    int active_waypoint = 0;   // index being pursued when the sample was taken
};

// Body attitude quaternion for yaw/pitch/roll (Z-Y-X intrinsic, applied in a
// north-east-down frame) expressed in the east-north-up world.
Eigen::Quaterniond attitude_enu(double heading, double pitch, double roll);

// Forward-integrates the vehicle from the first waypoint toward the rest.
// Terminates at t_end or when the final waypoint is captured. Throws
// DomainError for fewer than 2 waypoints or non-positive dt.
std::vector<TrajectorySample> plan_trajectory(const std::vector<Waypoint>& waypoints,
                                              const VehicleConfig& cfg, double dt, double t_end);

Pose sample_camera_pose(const TrajectorySample& sample);

}  // namespace gsim
