#include "gsim/raster.hpp"

#include "gsim/errors.hpp"

#include <png.h>
#include <zlib.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gsim {

Raster::Raster(int w, int h, int b) : width(w), height(h), bands(b) {
    if (w < 1 || h < 1 || (b != 1 && b != 3)) {
        throw DomainError("invalid raster shape " + std::to_string(w) + "x" +
                          std::to_string(h) + "x" + std::to_string(b));
    }
    samples.assign(static_cast<std::size_t>(w) * h * b, 0);
}

void validate_raster(const Raster& r) {
    if (r.width < 1 || r.height < 1) {
        throw DomainError("raster dimensions must be >= 1");
    }
    if (r.bands != 1 && r.bands != 3) {
        throw DomainError("raster bands must be 1 or 3, got " + std::to_string(r.bands));
    }
    const std::size_t expected = static_cast<std::size_t>(r.width) * r.height * r.bands;
    if (r.samples.size() != expected) {
        throw DomainError("raster sample count " + std::to_string(r.samples.size()) +
                          " does not match " + std::to_string(expected));
    }
}

double sample_bilinear(const Raster& r, double u, double v, int band) {
    if (!(u >= 0.0) || !(v >= 0.0) || !(u <= r.width - 1.0) || !(v <= r.height - 1.0)) {
        throw OutOfBounds("bilinear sample (" + std::to_string(u) + ", " + std::to_string(v) +
                          ") outside raster " + std::to_string(r.width) + "x" +
                          std::to_string(r.height));
    }
    int u0 = static_cast<int>(std::floor(u));
    int v0 = static_cast<int>(std::floor(v));
    if (u0 == r.width - 1) u0--;    // right/bottom edge: use the last full cell
    if (v0 == r.height - 1) v0--;
    if (u0 < 0) u0 = 0;
    if (v0 < 0) v0 = 0;
    const double fu = u - u0;
    const double fv = v - v0;
    const double p00 = r.at(u0, v0, band);
    const double p10 = r.at(u0 + 1, v0, band);
    const double p01 = r.at(u0, v0 + 1, band);
    const double p11 = r.at(u0 + 1, v0 + 1, band);
    return p00 * (1.0 - fu) * (1.0 - fv) + p10 * fu * (1.0 - fv) + p01 * (1.0 - fu) * fv +
           p11 * fu * fv;
}

Raster to_grayscale(const Raster& r) {
    if (r.bands == 1) return r;
    Raster out(r.width, r.height, 1);
    const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 0.299 * r.samples[i * 3] + 0.587 * r.samples[i * 3 + 1] +
                         0.114 * r.samples[i * 3 + 2];
        out.samples[i] = static_cast<std::uint8_t>(std::lround(y));
    }
    return out;
}

Raster resample_bilinear(const Raster& r, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1) {
        throw DomainError("resample target must be >= 1 pixel");
    }
    Raster out(new_width, new_height, r.bands);
    // Area-consistent mapping: output pixel center i+0.5 maps to input
    // coordinate (i+0.5)*scale - 0.5 in pixel-center units.
    const double sx = static_cast<double>(r.width) / new_width;
    const double sy = static_cast<double>(r.height) / new_height;
    for (int v = 0; v < new_height; ++v) {
        double src_v = (v + 0.5) * sy - 0.5;
        if (src_v < 0.0) src_v = 0.0;
        if (src_v > r.height - 1.0) src_v = r.height - 1.0;
        for (int u = 0; u < new_width; ++u) {
            double src_u = (u + 0.5) * sx - 0.5;
            if (src_u < 0.0) src_u = 0.0;
            if (src_u > r.width - 1.0) src_u = r.width - 1.0;
            for (int b = 0; b < r.bands; ++b) {
                out.at(u, v, b) = static_cast<std::uint8_t>(
                    std::lround(sample_bilinear(r, src_u, src_v, b)));
            }
        }
    }
    return out;
}

Raster box_downsample(const Raster& r, int factor) {
    if (factor < 1) throw DomainError("box filter factor must be >= 1");
    if (factor == 1) return r;
    const int nw = (r.width + factor - 1) / factor;
    const int nh = (r.height + factor - 1) / factor;
    Raster out(nw, nh, r.bands);
    for (int v = 0; v < nh; ++v) {
        const int y0 = v * factor;
        const int y1 = std::min(y0 + factor, r.height);
        for (int u = 0; u < nw; ++u) {
            const int x0 = u * factor;
            const int x1 = std::min(x0 + factor, r.width);
            for (int b = 0; b < r.bands; ++b) {
                long sum = 0;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) sum += r.at(x, y, b);
                const int count = (y1 - y0) * (x1 - x0);
                out.at(u, v, b) =
                    static_cast<std::uint8_t>((sum + count / 2) / count);
            }
        }
    }
    return out;
}

Raster crop(const Raster& r, int x0, int y0, int width, int height) {
    if (x0 < 0 || y0 < 0 || width < 1 || height < 1 || x0 + width > r.width ||
        y0 + height > r.height) {
        throw OutOfBounds("crop window outside raster");
    }
    Raster out(width, height, r.bands);
    for (int v = 0; v < height; ++v) {
        const std::uint8_t* src = r.samples.data() + r.index(x0, y0 + v, 0);
        std::uint8_t* dst = out.samples.data() + out.index(0, v, 0);
        std::copy(src, src + static_cast<std::size_t>(width) * r.bands, dst);
    }
    return out;
}

namespace {

int read_pnm_int(std::istream& in) {
    // Skips whitespace and '#' comments between header tokens.
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw CorruptTile("malformed PNM header");
    return value;
}

Raster decode_pnm(std::istream& in, const std::string& what) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw CorruptTile(what + ": not a binary PGM/PPM");
    }
    const int bands = magic[1] == '6' ? 3 : 1;
    const int w = read_pnm_int(in);
    const int h = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    if (maxval != 255) throw CorruptTile(what + ": unsupported PNM maxval " + std::to_string(maxval));
    if (w < 1 || h < 1) throw CorruptTile(what + ": bad PNM dimensions");
    Raster r(w, h, bands);
    in.read(reinterpret_cast<char*>(r.samples.data()),
            static_cast<std::streamsize>(r.samples.size()));
    if (in.gcount() != static_cast<std::streamsize>(r.samples.size())) {
        throw CorruptTile(what + ": truncated PNM payload");
    }
    return r;
}

struct PngReadCtx {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->offset + len > ctx->size) {
        png_error(png, "read past end of buffer");
    }
    std::memcpy(out, ctx->data + ctx->offset, len);
    ctx->offset += len;
}

Raster decode_png(const std::vector<std::uint8_t>& bytes, const std::string& what) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw CorruptTile(what + ": png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw CorruptTile(what + ": png init failed");
    }
    Raster r;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptTile(what + ": png decode failed");
    }
    PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, png_read_from_memory);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptTile(what + ": unsupported channel count " + std::to_string(channels));
    }
    r = Raster(static_cast<int>(w), static_cast<int>(h), channels);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = r.samples.data() + static_cast<std::size_t>(y) * w * channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return r;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

}  // namespace

Raster decode_image(const std::vector<std::uint8_t>& bytes, const std::string& what) {
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
        bytes[3] == 'G') {
        return decode_png(bytes, what);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        std::istringstream in(std::string(bytes.begin(), bytes.end()));
        return decode_pnm(in, what);
    }
    throw CorruptTile(what + ": unrecognized image format");
}

Raster read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_image(bytes, path);
}

void write_pnm(const std::string& path, const Raster& r) {
    validate_raster(r);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << (r.bands == 3 ? "P6" : "P5") << "\n"
        << r.width << " " << r.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(r.samples.data()),
              static_cast<std::streamsize>(r.samples.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::vector<std::uint8_t> encode_png(const Raster& r) {
    validate_raster(r);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png init failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encode failed");
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, r.width, r.height, 8,
                 r.bands == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < r.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(
                               r.samples.data() + static_cast<std::size_t>(y) * r.width * r.bands));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_png(const std::string& path, const Raster& r) {
    const std::vector<std::uint8_t> bytes = encode_png(r);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::uint32_t raster_checksum(const Raster& r) {
    return static_cast<std::uint32_t>(
        crc32(0L, r.samples.data(), static_cast<uInt>(r.samples.size())));
}

}  // namespace gsim
