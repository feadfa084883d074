#include "gsim/flight.hpp"

#include "gsim/errors.hpp"

#include <cmath>

namespace gsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

Eigen::Quaterniond attitude_enu(double heading, double pitch, double roll) {
    // Standard aerospace composition in north-east-down, then re-expressed in
    // east-north-up. P swaps the axes; it is its own inverse.
    static const Eigen::Matrix3d p = [] {
        Eigen::Matrix3d m;
        m << 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0;
        return m;
    }();
    const Eigen::Matrix3d r_ned =
        (Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
    return Eigen::Quaterniond(p * r_ned).normalized();
}

Pose sample_camera_pose(const TrajectorySample& sample) { return sample.camera_pose; }

std::vector<TrajectorySample> plan_trajectory(const std::vector<Waypoint>& waypoints,
                                              const VehicleConfig& cfg, double dt, double t_end) {
    if (waypoints.size() < 2) throw DomainError("trajectory needs at least 2 waypoints");
    if (!(dt > 0.0)) throw DomainError("integration step must be positive");
    if (!(cfg.airspeed > 0.0)) throw DomainError("airspeed must be positive");
    if (!(cfg.max_roll > 0.0) || !(cfg.max_roll < kPi / 2.0)) {
        throw DomainError("max_roll must lie in (0, pi/2)");
    }
    for (const auto& wp : waypoints) {
        if (!(wp.capture_radius > 0.0)) throw DomainError("capture radius must be positive");
        if (!(wp.position.z() > 0.0)) throw DomainError("waypoint altitude must be positive");
    }

    const double v = cfg.airspeed;
    Eigen::Vector3d pos = waypoints[0].position;
    std::size_t active = 1;
    auto bearing_to = [&pos](const Eigen::Vector3d& wp) {
        return std::atan2(wp.x() - pos.x(), wp.y() - pos.y());
    };
    double heading = bearing_to(waypoints[1].position);
    double roll = 0.0;

    std::vector<TrajectorySample> samples;
    samples.reserve(static_cast<std::size_t>(t_end / dt) + 2);

    const auto steps = static_cast<long>(std::ceil(t_end / dt));
    for (long step = 0; step <= steps; ++step) {
        const double t = step * dt;
        const Waypoint& wp = waypoints[active];

        // Capture check against the active waypoint (horizontal distance).
        const double horiz_dist = std::hypot(wp.position.x() - pos.x(), wp.position.y() - pos.y());
        bool finished = false;
        if (horiz_dist <= wp.capture_radius) {
            if (active + 1 < waypoints.size()) {
                ++active;
            } else {
                finished = true;
            }
        }

        const Waypoint& target = waypoints[active];
        const double climb = clamp(cfg.climb_gain * (target.position.z() - pos.z()),
                                   -cfg.max_climb_rate, cfg.max_climb_rate);
        const double pitch = std::asin(clamp(climb / v, -1.0, 1.0));

        TrajectorySample s;
        s.t = t;
        s.heading = heading;
        s.roll = roll;
        s.pitch = pitch;
        s.active_waypoint = static_cast<int>(active);
        s.pose.position = pos;
        s.pose.orientation = attitude_enu(heading, pitch, roll);
        s.camera_pose.position = pos;
        s.camera_pose.orientation = (s.pose.orientation * cfg.sensor_mount).normalized();
        samples.push_back(s);

        if (finished || step == steps) break;

        // Roll toward the waypoint bearing, slew-limited.
        const double err = wrap_angle(bearing_to(target.position) - heading);
        const double roll_cmd = clamp(cfg.roll_gain * err, -cfg.max_roll, cfg.max_roll);
        roll += clamp(roll_cmd - roll, -cfg.roll_rate_limit * dt, cfg.roll_rate_limit * dt);

        // Coordinated turn, then advance at constant total speed.
        heading = wrap_angle(heading + kGravity * std::tan(roll) / v * dt);
        const double vh = std::sqrt(std::max(0.0, v * v - climb * climb));
        pos.x() += vh * std::sin(heading) * dt;
        pos.y() += vh * std::cos(heading) * dt;
        pos.z() += climb * dt;
    }
    return samples;
}

}  // namespace gsim
