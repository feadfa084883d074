#pragma once

#include "gsim/camera.hpp"
#include "gsim/refmap.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

namespace gsim {

// Per-frame ground truth. Suppressed poses carry no footprint, homography or
// image fields but keep the pose and intrinsics for auditability.
struct TelemetryRecord {
    std::int64_t frame_id = 0;
    double t = 0.0;
    Modality modality = Modality::EO;
    bool suppressed = false;

    CameraIntrinsics intrinsics;
    std::array<double, 3> position{};         // camera center, world meters
    std::array<double, 4> quaternion_wxyz{};  // camera -> world

    // Present only when !suppressed.
    std::array<std::array<double, 3>, 4> world_corners{};
    std::array<std::array<double, 2>, 4> ref_corners{};
    std::array<double, 9> homography{};  // row-major, ref -> sensor, h33 = 1
    std::string image_path;

    double geo_lat = 0.0;  // map frame origin, for georeferencing clients
    double geo_lon = 0.0;
};

TelemetryRecord make_record(std::int64_t frame_id, double t, Modality modality,
                            const CameraIntrinsics& k, const Pose& camera_pose,
                            const ReferenceMap& map,
                            const std::optional<SimulatedFrame>& frame,
                            const std::string& image_path);

// One JSON object, newline-terminated, with stable field order and %.17g
// float formatting: identical records serialize to identical bytes.
std::string serialize_record(const TelemetryRecord& rec);

// Parses a serialized line back. Throws DomainError on malformed input.
TelemetryRecord parse_record(const std::string& line);

bool records_equal(const TelemetryRecord& a, const TelemetryRecord& b);

// Append-only JSONL sink, flushed per record. Throws IoError on failure so
// the simulation aborts rather than drop ground truth.
class TelemetrySink {
public:
    explicit TelemetrySink(const std::string& path);
    void write_line(const std::string& line);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

void write_record(TelemetrySink& sink, const TelemetryRecord& rec);

}  // namespace gsim
