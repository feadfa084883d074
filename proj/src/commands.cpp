#include "gsim/commands.hpp"

#include "gsim/errors.hpp"
#include "gsim/jsonwriter.hpp"
#include "gsim/sar.hpp"
#include "gsim/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace gsim {

namespace fs = std::filesystem;
using nlohmann::json;

FetchMapReport run_fetch_map(const FetchMapArgs& args, std::ostream& log) {
    const GeoPoint center{args.center_lat, args.center_lon};
    const auto addrs = tiles_for_bbox(center, args.width_m, args.height_m, args.zoom);
    log << "fetching " << addrs.size() << " tiles at z" << args.zoom << " from " << args.source
        << "\n";
    const auto tiles = fetch_tiles(args.source, addrs, args.fetch);

    const MercatorRect bbox = bbox_for_metric_region(center, args.width_m, args.height_m);
    StitchOptions opts;
    opts.modality = modality_from_name(args.modality);
    opts.source_descriptor = args.source;
    ReferenceMap map = stitch(tiles, args.zoom, bbox, opts);

    if (args.out_width_px > 0 && args.out_height_px > 0) {
        // Exact-size product: resample the mosaic onto the requested grid
        // over the same Mercator extent.
        const double extent_x = map.geotransform.pixel_size_x * map.raster.width;
        const double extent_y = map.geotransform.pixel_size_y * map.raster.height;
        Raster resized = resample_bilinear(map.raster, args.out_width_px, args.out_height_px);
        GeoTransform gt = map.geotransform;
        gt.pixel_size_x = extent_x / args.out_width_px;
        gt.pixel_size_y = extent_y / args.out_height_px;
        map = make_reference_map(std::move(resized), gt, map.frame, map.modality,
                                 map.source_descriptor);
    }
    save_bundle(map, args.out_dir);

    FetchMapReport report;
    report.width_px = map.raster.width;
    report.height_px = map.raster.height;
    report.tiles = static_cast<int>(tiles.size());
    report.ground_resolution_east =
        map.geotransform.pixel_size_x * map.frame.meters_per_mercator_unit;
    report.ground_resolution_north =
        map.geotransform.pixel_size_y * map.frame.meters_per_mercator_unit;
    report.width_m = report.ground_resolution_east * map.raster.width;
    report.height_m = report.ground_resolution_north * map.raster.height;
    log << "bundle " << args.out_dir << ": " << report.width_px << "x" << report.height_px
        << " px covering " << report.width_m << " x " << report.height_m << " m, "
        << report.ground_resolution_east << " m/px east, " << report.ground_resolution_north
        << " m/px north\n";
    return report;
}

void run_derive_sar(const DeriveSarArgs& args, std::ostream& log) {
    if (args.width_px < 1 || args.height_px < 1) {
        throw DomainError("derive-sar needs positive --size-px dimensions");
    }
    const ReferenceMap eo = load_bundle(args.from_bundle);
    PseudoSarOptions opts;
    opts.gamma = args.gamma;
    opts.looks = args.looks;
    const ReferenceMap sar = derive_sar_map(eo, args.width_px, args.height_px, args.seed, opts);
    save_bundle(sar, args.out_dir);
    log << "SAR bundle " << args.out_dir << ": " << sar.raster.width << "x" << sar.raster.height
        << " px, " << sar.ground_resolution << " m/px east\n";
}

SimulationSummary run_simulate(const std::string& scenario_path, std::ostream& log) {
    const ScenarioConfig cfg = load_scenario(scenario_path);
    const SimulationSummary summary = run_simulation(cfg);
    log << "simulated " << summary.records << " poses: " << summary.emitted << " frames, "
        << summary.suppressed << " suppressed\n"
        << "telemetry: " << summary.log_path << "\n";
    return summary;
}

std::string serialize_registration_result(const RegistrationResult& row) {
    JsonWriter w;
    w.begin_object();
    w.field("frame_id", static_cast<long long>(row.frame_id));
    w.field("modality", modality_name(row.modality));
    w.field("method", registration_method_name(row.method));
    w.field("failed", row.failed);
    w.field("failure_reason", row.failure_reason);
    w.field("success", row.success);
    w.field("score", row.score);
    w.field("corner_rms_ref_px", row.corner_rms_ref_px);
    w.field("corner_rms_sensed_px", row.corner_rms_sensed_px);
    w.key("h_est");
    w.begin_array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) w.value(row.failed ? 0.0 : row.h_est.h(r, c));
    w.end_array();
    w.key("h_truth_ref_to_sensor");
    w.begin_array();
    for (double v : row.h_truth_ref_to_sensor) w.value(v);
    w.end_array();
    w.field("image_path", row.image_path);
    w.end_object();
    return w.str() + "\n";
}

RegistrationResult parse_registration_result(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DomainError(std::string("report parse error: ") + e.what());
    }
    RegistrationResult row;
    row.frame_id = j.at("frame_id").get<std::int64_t>();
    row.modality = modality_from_name(j.at("modality").get<std::string>());
    row.method = j.at("method").get<std::string>() == "feature" ? RegistrationMethod::Feature
                                                                : RegistrationMethod::MutualInfo;
    row.failed = j.at("failed").get<bool>();
    row.failure_reason = j.at("failure_reason").get<std::string>();
    row.success = j.at("success").get<bool>();
    row.score = j.at("score").get<double>();
    row.corner_rms_ref_px = j.at("corner_rms_ref_px").get<double>();
    row.corner_rms_sensed_px = j.at("corner_rms_sensed_px").get<double>();
    Eigen::Matrix3d h;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) h(r, c) = j.at("h_est").at(r * 3 + c).get<double>();
    if (!row.failed) row.h_est = Homography{h};
    for (int i = 0; i < 9; ++i) {
        row.h_truth_ref_to_sensor[i] = j.at("h_truth_ref_to_sensor").at(i).get<double>();
    }
    row.image_path = j.at("image_path").get<std::string>();
    return row;
}

RegisterSummary run_register(const RegisterArgs& args, std::ostream& log) {
    std::ifstream in(args.telemetry_path);
    if (!in) throw IoError("cannot open telemetry log " + args.telemetry_path);
    const std::string frames_dir = args.frames_dir.empty()
                                       ? fs::path(args.telemetry_path).parent_path().string()
                                       : args.frames_dir;
    const ReferenceMap reference = load_bundle(args.reference_bundle);

    RegisterConfig cfg;
    cfg.method = registration_method_from_name(args.method);
    cfg.prior_noise_px = args.prior_noise_px;
    cfg.success_threshold_px = args.success_threshold_px;

    std::optional<Modality> filter;
    if (args.modality_filter) filter = modality_from_name(*args.modality_filter);

    if (!args.report_path.empty()) {
        fs::create_directories(fs::path(args.report_path).parent_path().empty()
                                   ? "."
                                   : fs::path(args.report_path).parent_path().string());
    }
    std::ofstream report;
    if (!args.report_path.empty()) {
        report.open(args.report_path, std::ios::binary | std::ios::trunc);
        if (!report) throw IoError("cannot open report " + args.report_path);
    }

    RegisterSummary summary;
    std::vector<double> errors;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const TelemetryRecord rec = parse_record(line);
        if (rec.suppressed) continue;
        if (filter && rec.modality != *filter) continue;
        const Raster sensed = read_image((fs::path(frames_dir) / rec.image_path).string());
        const RegistrationResult row =
            register_frame(sensed, reference, rec, cfg, args.seed);
        if (report.is_open()) report << serialize_registration_result(row);
        summary.rows.push_back(row);
        ++summary.frames;
        if (row.failed) {
            ++summary.failures;
        } else {
            errors.push_back(row.corner_rms_sensed_px);
        }
        if (row.success) ++summary.successes;
    }
    if (summary.frames > 0) {
        summary.success_rate =
            static_cast<double>(summary.successes) / static_cast<double>(summary.frames);
    }
    if (!errors.empty()) {
        summary.mean_corner_rms_sensed_px = 0.0;
        for (double e : errors) summary.mean_corner_rms_sensed_px += e;
        summary.mean_corner_rms_sensed_px /= static_cast<double>(errors.size());
        std::vector<double> sorted = errors;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        summary.median_corner_rms_sensed_px =
            sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    }

    if (report.is_open()) {
        report.close();
        JsonWriter w;
        w.begin_object();
        w.field("method", args.method);
        w.field("frames", summary.frames);
        w.field("successes", summary.successes);
        w.field("failures", summary.failures);
        w.field("success_rate", summary.success_rate);
        w.field("mean_corner_rms_sensed_px", summary.mean_corner_rms_sensed_px);
        w.field("median_corner_rms_sensed_px", summary.median_corner_rms_sensed_px);
        w.end_object();
        std::ofstream sum(args.report_path + ".summary.json", std::ios::binary | std::ios::trunc);
        if (!sum) throw IoError("cannot open summary " + args.report_path + ".summary.json");
        sum << w.str() << "\n";
    }

    log << args.method << " registration: " << summary.successes << "/" << summary.frames
        << " successes (rate " << summary.success_rate << "), median corner RMS "
        << summary.median_corner_rms_sensed_px << " px, " << summary.failures << " failures\n";
    return summary;
}

namespace {

void stroke_line(Raster& img, int band, double x0, double y0, double x1, double y1) {
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
        const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
        if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.at(x, y, band) = 255;
    }
}

}  // namespace

Raster render_overlay(const Raster& sensed_gray, const ReferenceMap& reference,
                      const Homography& h_est_sensed_to_ref,
                      const Homography& h_truth_sensed_to_ref) {
    const double w1 = sensed_gray.width - 1.0;
    const double h1 = sensed_gray.height - 1.0;
    const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {w1, 0.0}, {w1, h1}, {0.0, h1}};

    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    Eigen::Vector2d truth_corners[4];
    for (int i = 0; i < 4; ++i) {
        truth_corners[i] = h_truth_sensed_to_ref.apply(corners[i]);
        const Eigen::Vector2d est = h_est_sensed_to_ref.apply(corners[i]);
        min_x = std::min({min_x, truth_corners[i].x(), est.x()});
        max_x = std::max({max_x, truth_corners[i].x(), est.x()});
        min_y = std::min({min_y, truth_corners[i].y(), est.y()});
        max_y = std::max({max_y, truth_corners[i].y(), est.y()});
    }
    const int margin = 16;
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x)) - margin);
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y)) - margin);
    const int x1 = std::min(reference.raster.width - 1, static_cast<int>(std::ceil(max_x)) + margin);
    const int y1 = std::min(reference.raster.height - 1, static_cast<int>(std::ceil(max_y)) + margin);
    if (x1 - x0 < 2 || y1 - y0 < 2) throw DomainError("overlay region is degenerate");

    const Raster ref_gray = to_grayscale(crop(reference.raster, x0, y0, x1 - x0 + 1, y1 - y0 + 1));
    Raster out(ref_gray.width, ref_gray.height, 3);

    const Homography est_inv = h_est_sensed_to_ref.inverse();
    for (int v = 0; v < out.height; ++v) {
        for (int u = 0; u < out.width; ++u) {
            out.at(u, v, 1) = ref_gray.at(u, v);  // green: reference intensities
            const Eigen::Vector2d q =
                est_inv.apply({static_cast<double>(u + x0), static_cast<double>(v + y0)});
            if (q.x() >= 0.0 && q.y() >= 0.0 && q.x() <= w1 && q.y() <= h1) {
                out.at(u, v, 0) = static_cast<std::uint8_t>(
                    std::lround(sample_bilinear(sensed_gray, q.x(), q.y(), 0)));
            }
        }
    }
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d& a = truth_corners[i];
        const Eigen::Vector2d& b = truth_corners[(i + 1) % 4];
        stroke_line(out, 2, a.x() - x0, a.y() - y0, b.x() - x0, b.y() - y0);
    }
    return out;
}

int run_fuse_overlay(const FuseOverlayArgs& args, std::ostream& log) {
    std::ifstream in(args.report_path);
    if (!in) throw IoError("cannot open report " + args.report_path);
    const ReferenceMap reference = load_bundle(args.reference_bundle);
    fs::create_directories(args.out_dir);

    int written = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const RegistrationResult row = parse_registration_result(line);
        if (row.failed) continue;
        Eigen::Matrix3d ht;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) ht(r, c) = row.h_truth_ref_to_sensor[r * 3 + c];
        const Homography truth_inv = normalize_homography(ht).inverse();
        const Raster sensed =
            to_grayscale(read_image((fs::path(args.frames_dir) / row.image_path).string()));
        const Raster overlay = render_overlay(sensed, reference, row.h_est, truth_inv);
        char name[64];
        std::snprintf(name, sizeof(name), "overlay_%06lld_%s.ppm",
                      static_cast<long long>(row.frame_id),
                      registration_method_name(row.method).c_str());
        write_pnm((fs::path(args.out_dir) / name).string(), overlay);
        ++written;
    }
    log << "wrote " << written << " overlays to " << args.out_dir << "\n";
    return written;
}

int run_synth_tiles(const SynthTilesArgs& args, std::ostream& log) {
    const GeoPoint center{args.center_lat, args.center_lon};
    auto addrs = tiles_for_bbox(center, args.width_m, args.height_m, args.zoom);
    if (args.margin_tiles > 0 && !addrs.empty()) {
        const int n = 1 << args.zoom;
        int x0 = addrs.front().x, y0 = addrs.front().y;
        int x1 = addrs.back().x, y1 = addrs.back().y;
        x0 = std::max(0, x0 - args.margin_tiles);
        y0 = std::max(0, y0 - args.margin_tiles);
        x1 = std::min(n - 1, x1 + args.margin_tiles);
        y1 = std::min(n - 1, y1 + args.margin_tiles);
        addrs.clear();
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) addrs.push_back({args.zoom, x, y});
    }
    SceneSpec spec;
    spec.seed = args.seed;
    write_fixture_tiles(spec, args.out_dir, addrs);
    log << "wrote " << addrs.size() << " synthetic tiles to " << args.out_dir << "\n";
    return static_cast<int>(addrs.size());
}

}  // namespace gsim
