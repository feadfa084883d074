#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsim/errors.hpp"
#include "gsim/flight.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace gsim;

namespace {

double wrap(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

// Algebraic (Kasa) circle fit: x^2 + y^2 = 2 a x + 2 b y + c.
void fit_circle(const std::vector<Eigen::Vector2d>& pts, Eigen::Vector2d& center,
                double& radius) {
    Eigen::MatrixXd m(pts.size(), 3);
    Eigen::VectorXd rhs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m(i, 0) = 2.0 * pts[i].x();
        m(i, 1) = 2.0 * pts[i].y();
        m(i, 2) = 1.0;
        rhs(i) = pts[i].squaredNorm();
    }
    const Eigen::Vector3d sol = m.colPivHouseholderQr().solve(rhs);
    center = {sol(0), sol(1)};
    radius = std::sqrt(sol(2) + sol.head<2>().squaredNorm());
}

Eigen::Matrix3d quat_matrix_oracle(const Eigen::Quaterniond& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

}  // namespace

TEST_CASE("aligned straight leg flies with zero roll at constant altitude") {
    const std::vector<Waypoint> wps = {{{0.0, 0.0, 200.0}, 20.0}, {{0.0, 1500.0, 200.0}, 20.0}};
    VehicleConfig cfg;
    cfg.airspeed = 25.0;
    const auto samples = plan_trajectory(wps, cfg, 0.02, 120.0);
    REQUIRE(samples.size() > 100);
    for (const auto& s : samples) {
        CHECK(s.roll == 0.0);
        CHECK(s.pose.position.x() == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(s.pose.position.z() == doctest::Approx(200.0).epsilon(1e-9));
    }
    // The run ends by capturing the far waypoint, not by timeout.
    const auto& last = samples.back();
    CHECK(std::hypot(last.pose.position.x() - 0.0, last.pose.position.y() - 1500.0) <= 20.0);
}

TEST_CASE("sustained max-bank turn traces the coordinated-turn circle") {
    // North leg, then a forced 180-degree reversal saturates the roll.
    const std::vector<Waypoint> wps = {{{0.0, 0.0, 200.0}, 20.0},
                                       {{0.0, 600.0, 200.0}, 25.0},
                                       {{0.0, -4000.0, 200.0}, 25.0}};
    VehicleConfig cfg;
    cfg.airspeed = 20.0;
    cfg.max_roll = degrees_to_radians(30.0);
    const double dt = 0.02;
    const auto samples = plan_trajectory(wps, cfg, dt, 300.0);

    // Longest run of saturated roll.
    std::size_t best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(std::abs(samples[i].roll) - cfg.max_roll) < 1e-12) {
            if (run_len == 0) run_start = i;
            if (++run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    const double expected_radius =
        cfg.airspeed * cfg.airspeed / (kGravity * std::tan(cfg.max_roll));
    REQUIRE(static_cast<double>(best_len) * dt > 5.0);  // several seconds of steady bank

    std::vector<Eigen::Vector2d> pts;
    for (std::size_t i = best_start + 25; i + 25 < best_start + best_len; ++i) {
        pts.push_back({samples[i].pose.position.x(), samples[i].pose.position.y()});
    }
    REQUIRE(pts.size() > 100);
    Eigen::Vector2d center;
    double radius = 0.0;
    fit_circle(pts, center, radius);
    CHECK(std::abs(radius - expected_radius) / expected_radius < 0.01);
}

TEST_CASE("square circuit captures every waypoint within its radius") {
    const double alt = 150.0;
    const std::vector<Waypoint> wps = {{{0.0, 0.0, alt}, 30.0},
                                       {{0.0, 800.0, alt}, 30.0},
                                       {{800.0, 800.0, alt}, 30.0},
                                       {{800.0, 0.0, alt}, 30.0},
                                       {{0.0, 0.0, alt}, 30.0}};
    VehicleConfig cfg;
    cfg.airspeed = 25.0;
    const auto samples = plan_trajectory(wps, cfg, 0.02, 600.0);

    int captures = 0;
    int active = samples.front().active_waypoint;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].active_waypoint != active) {
            // The switch happened at sample i: distance to the waypoint that
            // was just captured must be inside its radius.
            const auto& wp = wps[static_cast<std::size_t>(active)];
            const double d = std::hypot(samples[i].pose.position.x() - wp.position.x(),
                                        samples[i].pose.position.y() - wp.position.y());
            CHECK(d <= wp.capture_radius);
            active = samples[i].active_waypoint;
            ++captures;
        }
    }
    CHECK(captures == 3);  // switches 1->2, 2->3, 3->4
    // Final waypoint captured too (run ended before the time limit).
    const auto& last = samples.back();
    CHECK(std::hypot(last.pose.position.x(), last.pose.position.y()) <= 30.0);
}

TEST_CASE("speed invariant and roll limits hold at every step") {
    const std::vector<Waypoint> wps = {{{0.0, 0.0, 100.0}, 30.0},
                                       {{700.0, 300.0, 220.0}, 30.0},
                                       {{-400.0, 700.0, 140.0}, 30.0},
                                       {{0.0, -500.0, 180.0}, 30.0}};
    VehicleConfig cfg;
    cfg.airspeed = 22.0;
    const double dt = 0.02;
    const auto samples = plan_trajectory(wps, cfg, dt, 400.0);
    REQUIRE(samples.size() > 1000);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double step = (samples[i].pose.position - samples[i - 1].pose.position).norm();
        CHECK(std::abs(step - cfg.airspeed * dt) < 1e-9);
        CHECK(std::abs(samples[i].roll) <= cfg.max_roll + 1e-12);
        CHECK(std::abs(samples[i].roll - samples[i - 1].roll) <=
              cfg.roll_rate_limit * dt + 1e-12);
        CHECK(std::abs(samples[i].pitch) <= std::asin(cfg.max_climb_rate / cfg.airspeed) + 1e-12);
    }
}

TEST_CASE("heading matches a half-step-size integration") {
    const std::vector<Waypoint> wps = {{{0.0, 0.0, 150.0}, 25.0},
                                       {{500.0, 500.0, 150.0}, 25.0},
                                       {{-500.0, 500.0, 150.0}, 25.0}};
    VehicleConfig cfg;
    const auto coarse = plan_trajectory(wps, cfg, 0.02, 60.0);
    const auto fine = plan_trajectory(wps, cfg, 0.01, 60.0);
    // Compare headings at shared timestamps over the common horizon.
    const std::size_t n = std::min(coarse.size(), (fine.size() + 1) / 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(wrap(coarse[i].heading - fine[2 * i].heading)));
    }
    CHECK(worst < 0.05);  // O(dt) agreement
}

TEST_CASE("heading equals the integral of the commanded turn rate") {
    const std::vector<Waypoint> wps = {{{0.0, 0.0, 150.0}, 25.0},
                                       {{300.0, 900.0, 150.0}, 25.0},
                                       {{-600.0, 200.0, 150.0}, 25.0}};
    VehicleConfig cfg;
    const double dt = 0.02;
    const auto samples = plan_trajectory(wps, cfg, dt, 90.0);
    double integral = samples.front().heading;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        integral += kGravity * std::tan(samples[i].roll) / cfg.airspeed * dt;
        CHECK(std::abs(wrap(samples[i].heading - wrap(integral))) < 1e-9);
    }
}

TEST_CASE("level flight with the nadir mount looks straight down") {
    TrajectorySample s;
    s.pose.orientation = attitude_enu(0.0, 0.0, 0.0);
    s.camera_pose.orientation = (s.pose.orientation * VehicleConfig::nadir_mount()).normalized();
    const Pose cam = sample_camera_pose(s);
    const Eigen::Vector3d axis = cam.orientation * Eigen::Vector3d::UnitZ();
    CHECK(axis.isApprox(Eigen::Vector3d(0, 0, -1), 1e-12));
    // Image +u axis aligns with body right (east when heading north).
    const Eigen::Vector3d u_axis = cam.orientation * Eigen::Vector3d::UnitX();
    CHECK(u_axis.isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));
}

TEST_CASE("a 30 degree right roll tilts the optical axis 30 degrees") {
    TrajectorySample s;
    s.pose.orientation = attitude_enu(0.0, 0.0, degrees_to_radians(30.0));
    s.camera_pose.orientation = (s.pose.orientation * VehicleConfig::nadir_mount()).normalized();
    const Eigen::Vector3d axis = sample_camera_pose(s).orientation * Eigen::Vector3d::UnitZ();
    const double tilt = std::acos(axis.dot(Eigen::Vector3d(0, 0, -1)));
    CHECK(tilt == doctest::Approx(degrees_to_radians(30.0)).epsilon(1e-12));
    // The tilt stays in the body-right (east-west) plane; body-down swings
    // west while the lift vector banks east.
    CHECK(axis.x() == doctest::Approx(-std::sin(degrees_to_radians(30.0))).epsilon(1e-12));
    CHECK(std::abs(axis.y()) < 1e-12);
}

TEST_CASE("composed camera quaternion matches the matrix oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);
    VehicleConfig cfg;
    for (int i = 0; i < 200; ++i) {
        const double heading = angle(rng) * M_PI;
        const double pitch = angle(rng) * 0.4;
        const double roll = angle(rng) * 0.6;
        const Eigen::Quaterniond body = attitude_enu(heading, pitch, roll);
        const Eigen::Quaterniond cam = (body * cfg.sensor_mount).normalized();
        const Eigen::Matrix3d expected =
            quat_matrix_oracle(body) * quat_matrix_oracle(cfg.sensor_mount);
        CHECK((cam.toRotationMatrix() - expected).norm() < 1e-12);
    }
}

TEST_CASE("configuration errors are rejected") {
    VehicleConfig cfg;
    CHECK_THROWS_AS(plan_trajectory({}, cfg, 0.02, 10.0), DomainError);
    CHECK_THROWS_AS(plan_trajectory({{{0, 0, 100}, 10.0}}, cfg, 0.02, 10.0), DomainError);
    CHECK_THROWS_AS(
        plan_trajectory({{{0, 0, 100}, 10.0}, {{0, 500, 100}, 10.0}}, cfg, 0.0, 10.0),
        DomainError);
    CHECK_THROWS_AS(
        plan_trajectory({{{0, 0, -5}, 10.0}, {{0, 500, 100}, 10.0}}, cfg, 0.02, 10.0),
        DomainError);
}
