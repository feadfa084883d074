// georegsim: aerial multi-spectral image simulator and georegistration
// evaluation harness. Subcommands cover the full workflow: build a reference
// map from tiles, derive a pseudo-SAR companion, fly a scenario, register the
// resulting frames against the map and render diagnostic overlays.

#include "gsim/commands.hpp"
#include "gsim/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

bool parse_pair(const std::string& text, char sep, double& a, double& b) {
    const auto pos = text.find(sep);
    if (pos == std::string::npos) return false;
    try {
        a = std::stod(text.substr(0, pos));
        b = std::stod(text.substr(pos + 1));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

bool parse_int_pair(const std::string& text, char sep, int& a, int& b) {
    double da = 0, db = 0;
    if (!parse_pair(text, sep, da, db)) return false;
    a = static_cast<int>(da);
    b = static_cast<int>(db);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aerial multi-spectral image simulator and georegistration harness"};
    app.require_subcommand(1);

    // fetch-map
    auto* fetch = app.add_subcommand("fetch-map", "build a reference-map bundle from XYZ tiles");
    std::string center_text, size_text, out_size_text;
    gsim::FetchMapArgs fetch_args;
    fetch->add_option("--center", center_text, "map center as lat,lon")->required();
    fetch->add_option("--size-m", size_text, "metric extent as WIDTHxHEIGHT in meters")->required();
    fetch->add_option("--zoom", fetch_args.zoom, "tile zoom level")->required();
    fetch->add_option("--source", fetch_args.source,
                      "XYZ URL template with {z}/{x}/{y} or a tile directory")->required();
    fetch->add_option("--modality", fetch_args.modality, "EO|SAR|other");
    fetch->add_option("--out", fetch_args.out_dir, "output bundle directory")->required();
    fetch->add_option("--out-size-px", out_size_text, "resample to exact WxH pixels");
    fetch->add_option("--retries", fetch_args.fetch.retries, "fetch retries per tile");
    fetch->add_option("--parallel", fetch_args.fetch.parallelism, "concurrent tile fetches");

    // derive-sar
    auto* derive = app.add_subcommand("derive-sar", "derive a pseudo-SAR bundle from an EO bundle");
    gsim::DeriveSarArgs sar_args;
    std::string sar_size_text;
    derive->add_option("--from", sar_args.from_bundle, "source EO bundle")->required();
    derive->add_option("--out", sar_args.out_dir, "output bundle directory")->required();
    derive->add_option("--size-px", sar_size_text, "output WxH pixels")->required();
    derive->add_option("--seed", sar_args.seed, "speckle seed");
    derive->add_option("--gamma", sar_args.gamma, "intensity remap exponent");
    derive->add_option("--looks", sar_args.looks, "speckle looks");

    // simulate
    auto* sim = app.add_subcommand("simulate", "fly a scenario and write frames + telemetry");
    std::string scenario_path;
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    // register
    auto* reg = app.add_subcommand("register", "register frames against a reference bundle");
    gsim::RegisterArgs reg_args;
    reg->add_option("--telemetry", reg_args.telemetry_path, "telemetry JSONL log")->required();
    reg->add_option("--frames", reg_args.frames_dir, "frame directory (default: log directory)");
    reg->add_option("--reference", reg_args.reference_bundle, "reference bundle")->required();
    reg->add_option("--method", reg_args.method, "feature|mi")->required();
    reg->add_option("--report", reg_args.report_path, "output report JSONL")->required();
    std::string modality_filter;
    reg->add_option("--modality", modality_filter, "only register frames of this modality");
    reg->add_option("--seed", reg_args.seed, "run seed for priors and RANSAC");
    reg->add_option("--prior-noise-px", reg_args.prior_noise_px,
                    "prior perturbation, sensed pixels");
    reg->add_option("--threshold-px", reg_args.success_threshold_px,
                    "success threshold, sensed pixels");

    // fuse-overlay
    auto* fuse = app.add_subcommand("fuse-overlay", "render fused red/green/blue diagnostics");
    gsim::FuseOverlayArgs fuse_args;
    fuse->add_option("--report", fuse_args.report_path, "registration report JSONL")->required();
    fuse->add_option("--frames", fuse_args.frames_dir, "frame directory")->required();
    fuse->add_option("--reference", fuse_args.reference_bundle, "reference bundle")->required();
    fuse->add_option("--out", fuse_args.out_dir, "output directory")->required();

    // synth-tiles
    auto* synth = app.add_subcommand("synth-tiles", "write procedural fixture tiles (z/x/y.png)");
    gsim::SynthTilesArgs synth_args;
    std::string synth_center, synth_size;
    synth->add_option("--center", synth_center, "lat,lon")->required();
    synth->add_option("--size-m", synth_size, "WIDTHxHEIGHT meters")->required();
    synth->add_option("--zoom", synth_args.zoom, "tile zoom level")->required();
    synth->add_option("--out", synth_args.out_dir, "tile directory")->required();
    synth->add_option("--seed", synth_args.seed, "texture seed");
    synth->add_option("--margin", synth_args.margin_tiles, "extra tile rings");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fetch->parsed()) {
            if (!parse_pair(center_text, ',', fetch_args.center_lat, fetch_args.center_lon)) {
                throw gsim::DomainError("--center expects lat,lon");
            }
            if (!parse_pair(size_text, 'x', fetch_args.width_m, fetch_args.height_m)) {
                throw gsim::DomainError("--size-m expects WIDTHxHEIGHT");
            }
            if (!out_size_text.empty() &&
                !parse_int_pair(out_size_text, 'x', fetch_args.out_width_px,
                                fetch_args.out_height_px)) {
                throw gsim::DomainError("--out-size-px expects WxH");
            }
            gsim::run_fetch_map(fetch_args, std::cout);
        } else if (derive->parsed()) {
            if (!parse_int_pair(sar_size_text, 'x', sar_args.width_px, sar_args.height_px)) {
                throw gsim::DomainError("--size-px expects WxH");
            }
            gsim::run_derive_sar(sar_args, std::cout);
        } else if (sim->parsed()) {
            gsim::run_simulate(scenario_path, std::cout);
        } else if (reg->parsed()) {
            if (!modality_filter.empty()) reg_args.modality_filter = modality_filter;
            gsim::run_register(reg_args, std::cout);
        } else if (fuse->parsed()) {
            gsim::run_fuse_overlay(fuse_args, std::cout);
        } else if (synth->parsed()) {
            if (!parse_pair(synth_center, ',', synth_args.center_lat, synth_args.center_lon)) {
                throw gsim::DomainError("--center expects lat,lon");
            }
            if (!parse_pair(synth_size, 'x', synth_args.width_m, synth_args.height_m)) {
                throw gsim::DomainError("--size-m expects WIDTHxHEIGHT");
            }
            gsim::run_synth_tiles(synth_args, std::cout);
        }
    } catch (const gsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
