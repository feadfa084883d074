#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsim/errors.hpp"
#include "gsim/raster.hpp"

#include "support/fixtures.hpp"

#include <filesystem>
#include <random>

using namespace gsim;

namespace {

Raster random_raster(int w, int h, int bands, std::uint64_t seed) {
    Raster r(w, h, bands);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& s : r.samples) s = static_cast<std::uint8_t>(byte(rng));
    return r;
}

}  // namespace

TEST_CASE("bilinear sampling is exact at integer coordinates") {
    const Raster r = random_raster(17, 11, 1, 1);
    for (int v = 0; v < r.height; ++v) {
        for (int u = 0; u < r.width; ++u) {
            CHECK(sample_bilinear(r, u, v) == static_cast<double>(r.at(u, v)));
        }
    }
}

TEST_CASE("bilinear midpoint between 0 and 255 is 127.5") {
    Raster r(2, 1, 1);
    r.at(0, 0) = 0;
    r.at(1, 0) = 255;
    CHECK(sample_bilinear(r, 0.5, 0.0) == 127.5);
}

TEST_CASE("bilinear agrees with the direct four-corner formula") {
    const Raster r = random_raster(31, 23, 3, 2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> du(0.0, 30.0);
    std::uniform_real_distribution<double> dv(0.0, 22.0);
    for (int i = 0; i < 500; ++i) {
        const double u = du(rng), v = dv(rng);
        const int u0 = std::min(static_cast<int>(u), r.width - 2);
        const int v0 = std::min(static_cast<int>(v), r.height - 2);
        const double fu = u - u0, fv = v - v0;
        for (int b = 0; b < 3; ++b) {
            const double expected = r.at(u0, v0, b) * (1 - fu) * (1 - fv) +
                                    r.at(u0 + 1, v0, b) * fu * (1 - fv) +
                                    r.at(u0, v0 + 1, b) * (1 - fu) * fv +
                                    r.at(u0 + 1, v0 + 1, b) * fu * fv;
            CHECK(sample_bilinear(r, u, v, b) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("bilinear rejects out-of-domain coordinates") {
    const Raster r = random_raster(8, 8, 1, 4);
    CHECK_THROWS_AS(sample_bilinear(r, -0.01, 0.0), OutOfBounds);
    CHECK_THROWS_AS(sample_bilinear(r, 0.0, 7.01), OutOfBounds);
    CHECK_NOTHROW(sample_bilinear(r, 7.0, 7.0));
}

TEST_CASE("pnm round-trip is bit exact") {
    gsim::testing::TempDir tmp("raster");
    for (int bands : {1, 3}) {
        const Raster r = random_raster(21, 13, bands, 5 + bands);
        const std::string path =
            tmp.sub("img" + std::to_string(bands) + (bands == 3 ? ".ppm" : ".pgm"));
        write_pnm(path, r);
        const Raster back = read_image(path);
        CHECK(back.width == r.width);
        CHECK(back.height == r.height);
        CHECK(back.bands == r.bands);
        CHECK(back.samples == r.samples);
    }
}

TEST_CASE("png round-trip is bit exact") {
    gsim::testing::TempDir tmp("png");
    for (int bands : {1, 3}) {
        const Raster r = random_raster(33, 17, bands, 11 + bands);
        const std::string path = tmp.sub("img" + std::to_string(bands) + ".png");
        write_png(path, r);
        const Raster back = read_image(path);
        CHECK(back.bands == r.bands);
        CHECK(back.samples == r.samples);
    }
}

TEST_CASE("decode rejects garbage") {
    CHECK_THROWS_AS(decode_image({'n', 'o', 'p', 'e'}, "test"), CorruptTile);
}

TEST_CASE("crop copies the expected window") {
    const Raster r = random_raster(16, 16, 3, 6);
    const Raster c = crop(r, 3, 5, 7, 4);
    for (int v = 0; v < 4; ++v)
        for (int u = 0; u < 7; ++u)
            for (int b = 0; b < 3; ++b) CHECK(c.at(u, v, b) == r.at(u + 3, v + 5, b));
    CHECK_THROWS_AS(crop(r, 10, 10, 7, 7), OutOfBounds);
}

TEST_CASE("box downsample averages blocks") {
    Raster r(4, 2, 1);
    // One 2x2 block of {10, 20, 30, 40} and one of {0, 0, 0, 4}.
    r.at(0, 0) = 10;
    r.at(1, 0) = 20;
    r.at(0, 1) = 30;
    r.at(1, 1) = 40;
    r.at(2, 0) = 0;
    r.at(3, 0) = 0;
    r.at(2, 1) = 0;
    r.at(3, 1) = 4;
    const Raster d = box_downsample(r, 2);
    CHECK(d.width == 2);
    CHECK(d.height == 1);
    CHECK(d.at(0, 0) == 25);
    CHECK(d.at(1, 0) == 1);
}

TEST_CASE("grayscale conversion uses the luma weights") {
    Raster r(1, 1, 3);
    r.at(0, 0, 0) = 100;
    r.at(0, 0, 1) = 200;
    r.at(0, 0, 2) = 50;
    const Raster g = to_grayscale(r);
    CHECK(g.bands == 1);
    CHECK(g.at(0, 0) == static_cast<std::uint8_t>(std::lround(0.299 * 100 + 0.587 * 200 + 0.114 * 50)));
}

TEST_CASE("checksum changes when a sample changes") {
    Raster r = random_raster(12, 12, 1, 7);
    const std::uint32_t before = raster_checksum(r);
    r.at(3, 4) ^= 0x80;
    CHECK(raster_checksum(r) != before);
}
