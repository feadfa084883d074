#include "gsim/telemetry.hpp"

#include "gsim/errors.hpp"
#include "gsim/jsonwriter.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace gsim {

using nlohmann::json;

TelemetryRecord make_record(std::int64_t frame_id, double t, Modality modality,
                            const CameraIntrinsics& k, const Pose& camera_pose,
                            const ReferenceMap& map,
                            const std::optional<SimulatedFrame>& frame,
                            const std::string& image_path) {
    TelemetryRecord rec;
    rec.frame_id = frame_id;
    rec.t = t;
    rec.modality = modality;
    rec.suppressed = !frame.has_value();
    rec.intrinsics = k;
    rec.position = {camera_pose.position.x(), camera_pose.position.y(), camera_pose.position.z()};
    rec.quaternion_wxyz = {camera_pose.orientation.w(), camera_pose.orientation.x(),
                           camera_pose.orientation.y(), camera_pose.orientation.z()};
    rec.geo_lat = map.frame.origin_geo.lat;
    rec.geo_lon = map.frame.origin_geo.lon;
    if (frame) {
        for (int i = 0; i < 4; ++i) {
            rec.world_corners[i] = {frame->footprint.world_corners[i].x(),
                                    frame->footprint.world_corners[i].y(),
                                    frame->footprint.world_corners[i].z()};
            rec.ref_corners[i] = {frame->footprint.ref_corners[i].x(),
                                  frame->footprint.ref_corners[i].y()};
        }
        const Eigen::Matrix3d& h = frame->homography.h;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rec.homography[r * 3 + c] = h(r, c);
        rec.image_path = image_path;
    }
    return rec;
}

std::string serialize_record(const TelemetryRecord& rec) {
    JsonWriter w;
    w.begin_object();
    w.field("frame_id", static_cast<long long>(rec.frame_id));
    w.field("t", rec.t);
    w.field("modality", modality_name(rec.modality));
    w.field("suppressed", rec.suppressed);

    w.key("intrinsics");
    w.begin_object();
    w.field("fx", rec.intrinsics.fx);
    w.field("fy", rec.intrinsics.fy);
    w.field("cx", rec.intrinsics.cx);
    w.field("cy", rec.intrinsics.cy);
    w.field("width", rec.intrinsics.width);
    w.field("height", rec.intrinsics.height);
    w.end_object();

    w.key("pose");
    w.begin_object();
    w.key("position");
    w.begin_array();
    for (double v : rec.position) w.value(v);
    w.end_array();
    w.key("quaternion_wxyz");
    w.begin_array();
    for (double v : rec.quaternion_wxyz) w.value(v);
    w.end_array();
    w.end_object();

    if (!rec.suppressed) {
        w.key("world_corners");
        w.begin_array();
        for (const auto& c : rec.world_corners) {
            w.begin_array();
            for (double v : c) w.value(v);
            w.end_array();
        }
        w.end_array();
        w.key("ref_corners");
        w.begin_array();
        for (const auto& c : rec.ref_corners) {
            w.begin_array();
            for (double v : c) w.value(v);
            w.end_array();
        }
        w.end_array();
        w.key("homography");
        w.begin_array();
        for (double v : rec.homography) w.value(v);
        w.end_array();
        w.field("image_path", rec.image_path);
    }

    w.key("geo");
    w.begin_object();
    w.field("lat", rec.geo_lat);
    w.field("lon", rec.geo_lon);
    w.end_object();

    w.end_object();
    return w.str() + "\n";
}

TelemetryRecord parse_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DomainError(std::string("telemetry parse error: ") + e.what());
    }
    try {
        TelemetryRecord rec;
        rec.frame_id = j.at("frame_id").get<std::int64_t>();
        rec.t = j.at("t").get<double>();
        rec.modality = modality_from_name(j.at("modality").get<std::string>());
        rec.suppressed = j.at("suppressed").get<bool>();
        const auto& k = j.at("intrinsics");
        rec.intrinsics.fx = k.at("fx").get<double>();
        rec.intrinsics.fy = k.at("fy").get<double>();
        rec.intrinsics.cx = k.at("cx").get<double>();
        rec.intrinsics.cy = k.at("cy").get<double>();
        rec.intrinsics.width = k.at("width").get<int>();
        rec.intrinsics.height = k.at("height").get<int>();
        const auto& pose = j.at("pose");
        for (int i = 0; i < 3; ++i) rec.position[i] = pose.at("position").at(i).get<double>();
        for (int i = 0; i < 4; ++i) {
            rec.quaternion_wxyz[i] = pose.at("quaternion_wxyz").at(i).get<double>();
        }
        if (!rec.suppressed) {
            for (int i = 0; i < 4; ++i) {
                for (int d = 0; d < 3; ++d) {
                    rec.world_corners[i][d] = j.at("world_corners").at(i).at(d).get<double>();
                }
                for (int d = 0; d < 2; ++d) {
                    rec.ref_corners[i][d] = j.at("ref_corners").at(i).at(d).get<double>();
                }
            }
            for (int i = 0; i < 9; ++i) rec.homography[i] = j.at("homography").at(i).get<double>();
            rec.image_path = j.at("image_path").get<std::string>();
        }
        rec.geo_lat = j.at("geo").at("lat").get<double>();
        rec.geo_lon = j.at("geo").at("lon").get<double>();
        return rec;
    } catch (const json::exception& e) {
        throw DomainError(std::string("telemetry schema error: ") + e.what());
    }
}

bool records_equal(const TelemetryRecord& a, const TelemetryRecord& b) {
    // Byte-stable serialization doubles as a complete equality check.
    return serialize_record(a) == serialize_record(b);
}

TelemetrySink::TelemetrySink(const std::string& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open telemetry log " + path);
}

void TelemetrySink::write_line(const std::string& line) {
    out_ << line;
    out_.flush();
    if (!out_) throw IoError("telemetry write failed: " + path_);
}

void write_record(TelemetrySink& sink, const TelemetryRecord& rec) {
    sink.write_line(serialize_record(rec));
}

}  // namespace gsim
