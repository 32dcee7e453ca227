#include "aquaflow/imgproc.hpp"

#include <cmath>
#include <cstdlib>

namespace aquaflow {

// Full-range BT.601:
//   Y = 0.299 R + 0.587 G + 0.114 B
//   U = 128 - 0.168736 R - 0.331264 G + 0.5 B
//   V = 128 + 0.5 R - 0.418688 G - 0.081312 B
// Evaluated through channel differences so that r == g == b gives u == v == 128
// exactly (the difference terms vanish identically instead of relying on the
// coefficients cancelling in floating point).
YuvFrame rgb_to_yuv(const RgbFrame& frame) {
    YuvFrame out(frame.width, frame.height);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.data[3 * i];
        const double g = frame.data[3 * i + 1];
        const double b = frame.data[3 * i + 2];
        out.y[i] = g + 0.299 * (r - g) + 0.114 * (b - g);
        out.u[i] = 128.0 + 0.168736 * (b - r) + 0.331264 * (b - g);
        out.v[i] = 128.0 + 0.418688 * (r - g) + 0.081312 * (r - b);
    }
    return out;
}

ScalarField chroma_difference(const YuvFrame& frame) {
    ScalarField out(frame.width, frame.height, FieldKind::chroma_difference);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i)
        out.data[i] = std::abs(frame.u[i] - frame.v[i]);
    return out;
}

ScalarField luma_field(const YuvFrame& frame) {
    ScalarField out(frame.width, frame.height, FieldKind::luma);
    out.data = frame.y;
    return out;
}

ScalarField chroma_difference(const RgbFrame& frame) {
    ScalarField out(frame.width, frame.height, FieldKind::chroma_difference);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.data[3 * i];
        const double g = frame.data[3 * i + 1];
        const double b = frame.data[3 * i + 2];
        const double u = 128.0 + 0.168736 * (b - r) + 0.331264 * (b - g);
        const double v = 128.0 + 0.418688 * (r - g) + 0.081312 * (r - b);
        out.data[i] = std::abs(u - v);
    }
    return out;
}

ScalarField luma_field(const RgbFrame& frame) {
    ScalarField out(frame.width, frame.height, FieldKind::luma);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.data[3 * i];
        const double g = frame.data[3 * i + 1];
        const double b = frame.data[3 * i + 2];
        out.data[i] = g + 0.299 * (r - g) + 0.114 * (b - g);
    }
    return out;
}

} // namespace aquaflow
