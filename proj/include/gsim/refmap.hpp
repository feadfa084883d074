#pragma once

#include "gsim/geodesy.hpp"
#include "gsim/raster.hpp"

#include <string>

namespace gsim {

// Axis-aligned affine link between raster pixels and EPSG:3857 coordinates.
// `origin` is the outer top-left corner of pixel (0,0); pixel centers sit at
// origin + (u+0.5, -(v+0.5)) * pixel_size. Rows advance southward.
struct GeoTransform {
    MercatorPoint origin;
    double pixel_size_x = 1.0;  // Mercator meters per pixel, eastward
    double pixel_size_y = 1.0;  // Mercator meters per pixel, southward rows

    MercatorPoint pixel_to_mercator(double u, double v) const {
        return {origin.x + (u + 0.5) * pixel_size_x, origin.y - (v + 0.5) * pixel_size_y};
    }
    // Continuous pixel-center coordinates of a Mercator point.
    void mercator_to_pixel(const MercatorPoint& p, double& u, double& v) const {
        u = (p.x - origin.x) / pixel_size_x - 0.5;
        v = (origin.y - p.y) / pixel_size_y - 0.5;
    }
};

enum class Modality { EO, SAR, Other };

std::string modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// Georeferenced terrain texture: one large raster plus the geotransform and
// the local planar world frame anchored at its center.
struct ReferenceMap {
    Raster raster;
    GeoTransform geotransform;
    LocalFrame frame;
    Modality modality = Modality::EO;
    std::string source_descriptor;
    double ground_resolution = 0.0;  // meters/pixel (east) at the frame origin

    // Continuous reference-pixel coordinates of a local world point.
    void local_to_pixel(const LocalPoint& p, double& u, double& v) const {
        geotransform.mercator_to_pixel(local_to_mercator(frame, p), u, v);
    }
    bool contains_pixel(double u, double v) const {
        return u >= 0.0 && v >= 0.0 && u <= raster.width - 1.0 && v <= raster.height - 1.0;
    }
};

// Assembles a ReferenceMap from its parts, deriving ground_resolution and
// checking the frame/geotransform center invariant. Throws DomainError.
ReferenceMap make_reference_map(Raster raster, const GeoTransform& gt, const LocalFrame& frame,
                                Modality modality, std::string source_descriptor);

// Bilinear sample in reference-pixel coordinates. Throws OutOfBounds outside
// the [0, width-1] x [0, height-1] domain.
double sample_bilinear(const ReferenceMap& map, double u, double v, int band = 0);

// --- Bundle format ---------------------------------------------------------
// A bundle is a directory holding metadata.json plus raster.ppm (RGB) or
// raster.pgm (grayscale). The metadata carries the geotransform, frame
// origin, modality, schema version and a CRC-32 of the raster samples.

inline constexpr int kBundleSchemaVersion = 1;

void save_bundle(const ReferenceMap& map, const std::string& dir);
ReferenceMap load_bundle(const std::string& dir);

}  // namespace gsim
