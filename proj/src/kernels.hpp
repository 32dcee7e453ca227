#pragma once

// Internal helpers: 1D Gaussian kernels and separable correlation passes.
// Templated on the element type; the streaming pipeline runs single precision,
// the verification APIs double. Not part of the public API.

#include <cmath>
#include <cstring>
#include <vector>

#include "aquaflow/field.hpp"

namespace aquaflow::detail {

enum class Pad { zero, replicate };

/// Normalized Gaussian taps for offsets -radius..radius (sum = 1).
template <class Real>
std::vector<Real> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    for (int u = -radius; u <= radius; ++u) {
        const double w = std::exp(-static_cast<double>(u) * u * inv2s2);
        k[u + radius] = w;
        sum += w;
    }
    std::vector<Real> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<Real>(k[i] / sum);
    return out;
}

inline int gaussian_radius(double sigma) {
    return std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
}

/// out(x,y) = sum_u k[u+r] * in(x+u, y), correlation along rows. Taps run in
/// groups of four so the output row is touched once per sweep; per output
/// element the accumulation order stays tap-ascending.
template <class Real>
void correlate_x(const Real* in, int w, int h, const Real* k, int r, Pad pad, Real* out) {
    std::vector<Real> padded(static_cast<std::size_t>(w) + 2 * r);
    for (int y = 0; y < h; ++y) {
        const Real* row = in + static_cast<std::size_t>(y) * w;
        if (pad == Pad::zero) {
            std::memset(padded.data(), 0, sizeof(Real) * r);
            std::memset(padded.data() + r + w, 0, sizeof(Real) * r);
        } else {
            for (int i = 0; i < r; ++i) padded[i] = row[0];
            for (int i = 0; i < r; ++i) padded[r + w + i] = row[w - 1];
        }
        std::memcpy(padded.data() + r, row, sizeof(Real) * w);
        Real* orow = out + static_cast<std::size_t>(y) * w;
        std::memset(orow, 0, sizeof(Real) * w);
        const int taps = 2 * r + 1;
        int t = 0;
        for (; t + 4 <= taps; t += 4) {
            const Real k0 = k[t], k1 = k[t + 1], k2 = k[t + 2], k3 = k[t + 3];
            const Real* p = padded.data() + t;
            for (int x = 0; x < w; ++x) {
                Real acc = orow[x];
                acc += k0 * p[x];
                acc += k1 * p[x + 1];
                acc += k2 * p[x + 2];
                acc += k3 * p[x + 3];
                orow[x] = acc;
            }
        }
        // remaining 1..3 taps in a single sweep
        const int rem = taps - t;
        if (rem > 0) {
            const Real k0 = k[t];
            const Real k1 = rem > 1 ? k[t + 1] : Real(0);
            const Real k2 = rem > 2 ? k[t + 2] : Real(0);
            const Real* p = padded.data() + t;
            if (rem == 3) {
                for (int x = 0; x < w; ++x) {
                    Real acc = orow[x];
                    acc += k0 * p[x];
                    acc += k1 * p[x + 1];
                    acc += k2 * p[x + 2];
                    orow[x] = acc;
                }
            } else if (rem == 2) {
                for (int x = 0; x < w; ++x) {
                    Real acc = orow[x];
                    acc += k0 * p[x];
                    acc += k1 * p[x + 1];
                    orow[x] = acc;
                }
            } else {
                for (int x = 0; x < w; ++x) orow[x] += k0 * p[x];
            }
        }
    }
}

/// out(x,y) = sum_v k[v+r] * in(x, y+v), correlation down columns. The inner
/// loop runs along x so it vectorizes; rows are processed in tiles so the
/// overlapping input rows stay cached across taps.
template <class Real>
void correlate_y(const Real* in, int w, int h, const Real* k, int r, Pad pad, Real* out) {
    constexpr int kTile = 64;
    auto clamp_row = [&](int yy) {
        if (yy < 0) return pad == Pad::zero ? -1 : 0;
        if (yy >= h) return pad == Pad::zero ? -1 : h - 1;
        return yy;
    };
    for (int y0 = 0; y0 < h; y0 += kTile) {
        const int y1 = std::min(h, y0 + kTile);
        std::memset(out + static_cast<std::size_t>(y0) * w, 0,
                    sizeof(Real) * w * static_cast<std::size_t>(y1 - y0));
        for (int y = y0; y < y1; ++y) {
            Real* orow = out + static_cast<std::size_t>(y) * w;
            const int taps = 2 * r + 1;
            int t = 0;
            // interior rows take the unrolled path; rows whose window clips
            // the image fall back to tap-by-tap with padding rules
            if (y - r >= 0 && y + r < h) {
                for (; t + 4 <= taps; t += 4) {
                    const Real k0 = k[t], k1 = k[t + 1], k2 = k[t + 2], k3 = k[t + 3];
                    const Real* r0 = in + static_cast<std::size_t>(y - r + t) * w;
                    const Real* r1 = r0 + w;
                    const Real* r2 = r1 + w;
                    const Real* r3 = r2 + w;
                    for (int x = 0; x < w; ++x) {
                        Real acc = orow[x];
                        acc += k0 * r0[x];
                        acc += k1 * r1[x];
                        acc += k2 * r2[x];
                        acc += k3 * r3[x];
                        orow[x] = acc;
                    }
                }
            }
            // remaining taps: group the in-range rows of the tail (or, for
            // clipped rows, everything) three at a time
            while (t < taps) {
                int rows_done = 0;
                const Real* rows[3];
                Real kk[3];
                while (t < taps && rows_done < 3) {
                    const int yy = clamp_row(y - r + t);
                    ++t;
                    if (yy < 0) continue;
                    rows[rows_done] = in + static_cast<std::size_t>(yy) * w;
                    kk[rows_done] = k[t - 1];
                    ++rows_done;
                }
                if (rows_done == 3) {
                    const Real k0 = kk[0], k1 = kk[1], k2 = kk[2];
                    const Real *r0 = rows[0], *r1 = rows[1], *r2 = rows[2];
                    for (int x = 0; x < w; ++x) {
                        Real acc = orow[x];
                        acc += k0 * r0[x];
                        acc += k1 * r1[x];
                        acc += k2 * r2[x];
                        orow[x] = acc;
                    }
                } else if (rows_done == 2) {
                    const Real k0 = kk[0], k1 = kk[1];
                    const Real *r0 = rows[0], *r1 = rows[1];
                    for (int x = 0; x < w; ++x) {
                        Real acc = orow[x];
                        acc += k0 * r0[x];
                        acc += k1 * r1[x];
                        orow[x] = acc;
                    }
                } else if (rows_done == 1) {
                    const Real k0 = kk[0];
                    const Real* r0 = rows[0];
                    for (int x = 0; x < w; ++x) orow[x] += k0 * r0[x];
                }
            }
        }
    }
}

/// Bilinear sample with coordinates clamped to the image rectangle.
template <class Real>
double bilinear(const Real* in, int w, int h, double x, double y) {
    if (x < 0) x = 0;
    if (y < 0) y = 0;
    if (x > w - 1) x = w - 1;
    if (y > h - 1) y = h - 1;
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = in[static_cast<std::size_t>(y0) * w + x0];
    const double v01 = in[static_cast<std::size_t>(y0) * w + x1];
    const double v10 = in[static_cast<std::size_t>(y1) * w + x0];
    const double v11 = in[static_cast<std::size_t>(y1) * w + x1];
    return (1 - fy) * ((1 - fx) * v00 + fx * v01) + fy * ((1 - fx) * v10 + fx * v11);
}

} // namespace aquaflow::detail
