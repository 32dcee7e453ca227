#include <doctest.h>

#include <cmath>

#include "aquaflow/imgproc.hpp"

using namespace aquaflow;

namespace {

RgbFrame single_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbFrame f(1, 1);
    f.data = {r, g, b};
    return f;
}

// independent evaluation of the BT.601 full-range matrix
void matrix_yuv(double r, double g, double b, double& y, double& u, double& v) {
    y = 0.299 * r + 0.587 * g + 0.114 * b;
    u = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    v = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
}

} // namespace

TEST_CASE("rgb_to_yuv: black and white are achromatic with exact luma") {
    const YuvFrame black = rgb_to_yuv(single_pixel(0, 0, 0));
    CHECK(black.y[0] == 0.0);
    CHECK(black.u[0] == 128.0);
    CHECK(black.v[0] == 128.0);

    const YuvFrame white = rgb_to_yuv(single_pixel(255, 255, 255));
    CHECK(white.y[0] == 255.0);
    CHECK(white.u[0] == 128.0);
    CHECK(white.v[0] == 128.0);
}

TEST_CASE("rgb_to_yuv: pure red matches the matrix") {
    const YuvFrame f = rgb_to_yuv(single_pixel(255, 0, 0));
    double y, u, v;
    matrix_yuv(255, 0, 0, y, u, v);
    CHECK(f.y[0] == doctest::Approx(y).epsilon(1e-12));
    CHECK(f.u[0] == doctest::Approx(u).epsilon(1e-12));
    CHECK(f.v[0] == doctest::Approx(v).epsilon(1e-12));
    // the values themselves, pinned
    CHECK(f.y[0] == doctest::Approx(76.245).epsilon(1e-9));
    CHECK(f.u[0] == doctest::Approx(84.97232).epsilon(1e-9));
    CHECK(f.v[0] == doctest::Approx(255.5).epsilon(1e-9));
}

TEST_CASE("rgb_to_yuv: matches the matrix on random pixels") {
    std::uint32_t state = 12345;
    auto rnd = [&] { return state = state * 1664525u + 1013904223u; };
    for (int i = 0; i < 200; ++i) {
        const std::uint8_t r = rnd() & 0xff, g = rnd() & 0xff, b = rnd() & 0xff;
        const YuvFrame f = rgb_to_yuv(single_pixel(r, g, b));
        double y, u, v;
        matrix_yuv(r, g, b, y, u, v);
        CHECK(f.y[0] == doctest::Approx(y).epsilon(1e-12));
        CHECK(f.u[0] == doctest::Approx(u).epsilon(1e-12));
        CHECK(f.v[0] == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("rgb_to_yuv: every gray level has u == v exactly") {
    for (int g = 0; g < 256; ++g) {
        const YuvFrame f = rgb_to_yuv(single_pixel(g, g, g));
        CHECK(f.u[0] == 128.0);
        CHECK(f.v[0] == 128.0);
        CHECK(f.y[0] == static_cast<double>(g));
    }
}

TEST_CASE("rgb_to_yuv is linear up to the (0,128,128) offset") {
    // alpha = 1/2 on even-valued pixels keeps inputs representable in 8 bits
    const RgbFrame p = single_pixel(200, 100, 40);
    const RgbFrame ph = single_pixel(100, 50, 20);
    const YuvFrame f = rgb_to_yuv(p);
    const YuvFrame fh = rgb_to_yuv(ph);
    CHECK(fh.y[0] == doctest::Approx(0.5 * f.y[0]).epsilon(1e-12));
    CHECK(fh.u[0] - 128.0 == doctest::Approx(0.5 * (f.u[0] - 128.0)).epsilon(1e-9));
    CHECK(fh.v[0] - 128.0 == doctest::Approx(0.5 * (f.v[0] - 128.0)).epsilon(1e-9));
}

TEST_CASE("chroma_difference: gray frames collapse to exact zero") {
    RgbFrame f(8, 6);
    std::uint32_t state = 7;
    for (int i = 0; i < 8 * 6; ++i) {
        state = state * 1664525u + 1013904223u;
        const std::uint8_t g = state & 0xff;
        f.data[3 * i] = f.data[3 * i + 1] = f.data[3 * i + 2] = g;
    }
    const ScalarField d = chroma_difference(rgb_to_yuv(f));
    CHECK(d.kind == FieldKind::chroma_difference);
    for (double v : d.data) CHECK(v == 0.0);
}

TEST_CASE("chroma_difference: red pixel value") {
    const ScalarField d = chroma_difference(rgb_to_yuv(single_pixel(255, 0, 0)));
    CHECK(d.data[0] == doctest::Approx(170.52768).epsilon(1e-9));
}

TEST_CASE("chroma_difference: zero everywhere iff frame is achromatic everywhere") {
    RgbFrame f(4, 4);
    for (int i = 0; i < 16; ++i)
        f.data[3 * i] = f.data[3 * i + 1] = f.data[3 * i + 2] = 90;
    f.data[3 * 5] = 120; // one chromatic pixel
    const ScalarField d = chroma_difference(rgb_to_yuv(f));
    int nonzero = 0;
    for (double v : d.data)
        if (v != 0.0) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(d.at(1, 1) > 0.0);
}

TEST_CASE("chroma_difference is invariant to a constant gray offset") {
    RgbFrame f(5, 5);
    std::uint32_t state = 99;
    for (int i = 0; i < 25; ++i) {
        state = state * 1664525u + 1013904223u;
        f.data[3 * i] = 30 + (state & 0x3f);
        f.data[3 * i + 1] = 30 + ((state >> 8) & 0x3f);
        f.data[3 * i + 2] = 30 + ((state >> 16) & 0x3f);
    }
    RgbFrame g = f;
    for (auto& v : g.data) v = static_cast<std::uint8_t>(v + 100); // no overflow by construction
    const ScalarField da = chroma_difference(rgb_to_yuv(f));
    const ScalarField db = chroma_difference(rgb_to_yuv(g));
    for (std::size_t i = 0; i < da.data.size(); ++i) CHECK(da.data[i] == db.data[i]);
}

TEST_CASE("synthetic bubbles on gray background vanish entirely") {
    RgbFrame f(32, 32);
    for (int i = 0; i < 32 * 32; ++i)
        f.data[3 * i] = f.data[3 * i + 1] = f.data[3 * i + 2] = 110;
    // white disks
    for (int y = 4; y < 10; ++y)
        for (int x = 20; x < 26; ++x) {
            std::uint8_t* p = f.pixel(x, y);
            p[0] = p[1] = p[2] = 244;
        }
    const ScalarField d = chroma_difference(rgb_to_yuv(f));
    double maxv = 0;
    for (double v : d.data) maxv = std::max(maxv, v);
    CHECK(maxv < 1e-9);
}
