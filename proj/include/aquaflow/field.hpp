#pragma once

#include <cstdint>
#include <vector>

#include "aquaflow/errors.hpp"

namespace aquaflow {

/// 8-bit interleaved RGB frame, row-major.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // r,g,b triples, data.size() == 3*width*height

    RgbFrame() = default;
    RgbFrame(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(3) * w * h) {}

    std::uint8_t* pixel(int x, int y) { return &data[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* pixel(int x, int y) const {
        return &data[3 * (static_cast<std::size_t>(y) * width + x)];
    }
};

/// Planar YUV frame with real-valued full-range samples. Chroma planes carry
/// the +128 offset; values are not clamped until export.
struct YuvFrame {
    int width = 0;
    int height = 0;
    std::vector<double> y, u, v; // each width*height, row-major

    YuvFrame() = default;
    YuvFrame(int w, int h)
        : width(w), height(h),
          y(static_cast<std::size_t>(w) * h),
          u(static_cast<std::size_t>(w) * h),
          v(static_cast<std::size_t>(w) * h) {}
};

/// What a single-channel field holds. Downstream stages check the tag instead
/// of guessing from context.
enum class FieldKind { chroma_difference, luma, magnitude, angle };

/// Row-major single-channel real field.
struct ScalarField {
    int width = 0;
    int height = 0;
    FieldKind kind = FieldKind::luma;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, FieldKind k)
        : width(w), height(h), kind(k), data(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    const double* row(int y) const { return &data[static_cast<std::size_t>(y) * width]; }
    double* row(int y) { return &data[static_cast<std::size_t>(y) * width]; }
};

/// Per-pixel displacement field. Invalid pixels carry (0,0).
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<double> dx, dy;
    std::vector<std::uint8_t> valid;

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h),
          dx(static_cast<std::size_t>(w) * h, 0.0),
          dy(static_cast<std::size_t>(w) * h, 0.0),
          valid(static_cast<std::size_t>(w) * h, 1) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Row-major dense matrix of doubles, used for accumulator snapshots and CSV io.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

inline void require_same_dims(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb)
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(wa) + "x" +
                                std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                                std::to_string(hb));
}

} // namespace aquaflow
