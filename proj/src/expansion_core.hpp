#pragma once

// Templated internals of the polynomial expansion. The public API instantiates
// double; the streaming pipeline instantiates float for throughput. Moment
// tables and per-pixel solves always run in double, only the image-sized
// planes carry the template type.

#include <array>
#include <cmath>

#include "aquaflow/polyexp.hpp"
#include "kernels.hpp"

namespace aquaflow::detail {

// Basis order used throughout: [1, x, y, x^2, y^2, xy].
inline constexpr int kBasisXExp[6] = {0, 1, 0, 2, 0, 1};
inline constexpr int kBasisYExp[6] = {0, 0, 1, 0, 2, 1};

using Mat6 = std::array<std::array<double, 6>, 6>;
using Vec6 = std::array<double, 6>;

// Cholesky solve of a symmetric positive definite 6x6 system. Returns false
// when a pivot collapses (degenerate normal equations).
inline bool cholesky_solve6(Mat6 g, Vec6 h, Vec6& out) {
    for (int j = 0; j < 6; ++j) {
        double d = g[j][j];
        for (int k = 0; k < j; ++k) d -= g[j][k] * g[j][k];
        if (!(d > 1e-300)) return false;
        d = std::sqrt(d);
        g[j][j] = d;
        for (int i = j + 1; i < 6; ++i) {
            double s = g[i][j];
            for (int k = 0; k < j; ++k) s -= g[i][k] * g[j][k];
            g[i][j] = s / d;
        }
    }
    for (int i = 0; i < 6; ++i) {
        double s = h[i];
        for (int k = 0; k < i; ++k) s -= g[i][k] * h[k];
        h[i] = s / g[i][i];
    }
    for (int i = 5; i >= 0; --i) {
        double s = h[i];
        for (int k = i + 1; k < 6; ++k) s -= g[k][i] * out[k];
        out[i] = s / g[i][i];
    }
    return true;
}

inline bool invert_spd6(const Mat6& g, Mat6& inv) {
    for (int col = 0; col < 6; ++col) {
        Vec6 e{};
        e[col] = 1.0;
        Vec6 x{};
        if (!cholesky_solve6(g, e, x)) return false;
        for (int row = 0; row < 6; ++row) inv[row][col] = x[row];
    }
    return true;
}

// 1D certainty moments per coordinate: m[i][x] = sum over in-window offsets u
// with x+u inside [0, n) of k[u] * u^i. Interior columns equal the full-window
// moments. Pairwise summation keeps odd full moments exactly zero.
struct MomentTable {
    std::vector<std::array<double, 5>> m;
    std::array<double, 5> full{};
};

inline MomentTable certainty_moments(int n, const std::vector<double>& k, int r, bool uniform) {
    MomentTable t;
    t.m.assign(n, {});
    for (int i = 0; i < 5; ++i) {
        double s = (i == 0) ? k[r] : 0.0;
        for (int u = 1; u <= r; ++u) {
            const double ui = std::pow(static_cast<double>(u), i);
            const double neg = (i % 2 == 0) ? ui : -ui; // (-u)^i
            s += k[u + r] * (ui + neg);
        }
        t.full[i] = s;
    }
    for (int x = 0; x < n; ++x) {
        if (uniform || (x >= r && x < n - r)) {
            t.m[x] = t.full;
            continue;
        }
        const int lo = std::max(-r, -x);
        const int hi = std::min(r, n - 1 - x);
        for (int i = 0; i < 5; ++i) {
            double s = 0.0;
            for (int u = lo; u <= hi; ++u) s += k[u + r] * std::pow(static_cast<double>(u), i);
            t.m[x][i] = s;
        }
    }
    return t;
}

inline Mat6 normal_matrix(const std::array<double, 5>& mx, const std::array<double, 5>& my) {
    Mat6 g;
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k)
            g[j][k] = mx[kBasisXExp[j] + kBasisXExp[k]] * my[kBasisYExp[j] + kBasisYExp[k]];
    return g;
}

inline void check_expansion_input(int w, int h, const ExpansionParams& p) {
    if (p.window_radius < 1) throw Error("polynomial_expansion: window_radius must be >= 1");
    if (!(p.applicability_sigma > 0))
        throw Error("polynomial_expansion: applicability_sigma must be > 0");
    if (w <= 2 * p.window_radius || h <= 2 * p.window_radius)
        throw FrameTooSmall("polynomial_expansion: field " + std::to_string(w) + "x" +
                            std::to_string(h) + " too small for window radius " +
                            std::to_string(p.window_radius));
}

// Caller-owned output planes; all are written in full.
template <class Real>
struct CoeffSpans {
    Real *a11, *a12, *a22, *b1, *b2, *c;
    std::uint8_t* low;
};

template <class Real>
void expand_core(const Real* data, int w, int h, const ExpansionParams& params,
                 CoeffSpans<Real> out, std::vector<Real> (&tx)[3], std::vector<Real> (&sm)[6]) {
    check_expansion_input(w, h, params);
    const int r = params.window_radius;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const std::vector<double> k = gaussian_kernel<double>(params.applicability_sigma, r);
    const bool uniform = params.certainty == ExpansionParams::Certainty::uniform;

    // x-pass kernels k*u^i, i = 0..2, applied to the (zero-padded) signal.
    std::vector<Real> kx[3];
    for (int i = 0; i < 3; ++i) {
        kx[i].resize(k.size());
        for (int u = -r; u <= r; ++u)
            kx[i][u + r] = static_cast<Real>(k[u + r] * std::pow(static_cast<double>(u), i));
    }

    for (auto& p : tx) p.resize(n);
    Real* tx0 = tx[0].data();
    Real* tx1 = tx[1].data();
    Real* tx2 = tx[2].data();
    correlate_x(data, w, h, kx[0].data(), r, Pad::zero, tx0);
    correlate_x(data, w, h, kx[1].data(), r, Pad::zero, tx1);
    correlate_x(data, w, h, kx[2].data(), r, Pad::zero, tx2);

    // y-pass: six signal moments in basis order.
    for (auto& p : sm) p.resize(n);
    auto* s = sm;
    correlate_y(tx0, w, h, kx[0].data(), r, Pad::zero, s[0].data()); // 1
    correlate_y(tx1, w, h, kx[0].data(), r, Pad::zero, s[1].data()); // x
    correlate_y(tx0, w, h, kx[1].data(), r, Pad::zero, s[2].data()); // y
    correlate_y(tx2, w, h, kx[0].data(), r, Pad::zero, s[3].data()); // x^2
    correlate_y(tx0, w, h, kx[2].data(), r, Pad::zero, s[4].data()); // y^2
    correlate_y(tx1, w, h, kx[1].data(), r, Pad::zero, s[5].data()); // xy

    const MomentTable mx = certainty_moments(w, k, r, uniform);
    const MomentTable my = certainty_moments(h, k, r, uniform);

    Mat6 g0inv;
    if (!invert_spd6(normal_matrix(mx.full, my.full), g0inv))
        throw Error("polynomial_expansion: full-window normal matrix is singular");
    Real inv[6][6];
    for (int j = 0; j < 6; ++j)
        for (int m = 0; m < 6; ++m) inv[j][m] = static_cast<Real>(g0inv[j][m]);

    // Interior (and, in uniform mode, everything): constant normal matrix, so
    // the solve is a fixed 6x6 linear combination of the moment planes,
    // evaluated plane-wise over cache-sized segments.
    const int bx0 = uniform ? 0 : r;
    const int bx1 = uniform ? w : w - r;
    const int by0 = uniform ? 0 : r;
    const int by1 = uniform ? h : h - r;
    Real* planes[6] = {out.c, out.b1, out.b2, out.a11, out.a22, out.a12};
    constexpr int kSeg = 512;
    for (int y = by0; y < by1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x0 = bx0; x0 < bx1; x0 += kSeg) {
            const int len = std::min(kSeg, bx1 - x0);
            const std::size_t base = row + x0;
            for (int j = 0; j < 6; ++j) {
                Real* o = planes[j] + base;
                const Real k0 = inv[j][0];
                const Real* s0 = s[0].data() + base;
                for (int x = 0; x < len; ++x) o[x] = k0 * s0[x];
                for (int m = 1; m < 6; ++m) {
                    const Real km = inv[j][m];
                    const Real* sp = s[m].data() + base;
                    for (int x = 0; x < len; ++x) o[x] += km * sp[x];
                }
            }
            Real* a12p = out.a12 + base;
            for (int x = 0; x < len; ++x) a12p[x] *= static_cast<Real>(0.5);
        }
    }

    // Border band: per-pixel normal matrix from the certainty moment tables.
    auto solve_pixel = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const Mat6 g = normal_matrix(mx.m[x], my.m[y]);
        Vec6 rhs = {static_cast<double>(s[0][i]), static_cast<double>(s[1][i]),
                    static_cast<double>(s[2][i]), static_cast<double>(s[3][i]),
                    static_cast<double>(s[4][i]), static_cast<double>(s[5][i])};
        Vec6 res{};
        if (cholesky_solve6(g, rhs, res)) {
            out.c[i] = static_cast<Real>(res[0]);
            out.b1[i] = static_cast<Real>(res[1]);
            out.b2[i] = static_cast<Real>(res[2]);
            out.a11[i] = static_cast<Real>(res[3]);
            out.a22[i] = static_cast<Real>(res[4]);
            out.a12[i] = static_cast<Real>(0.5 * res[5]);
        } else {
            // degenerate window: zero model around the local weighted mean
            const double mass = mx.m[x][0] * my.m[y][0];
            out.c[i] = static_cast<Real>(mass > 0 ? s[0][i] / mass : 0.0);
            out.b1[i] = out.b2[i] = 0;
            out.a11[i] = out.a12[i] = out.a22[i] = 0;
        }
    };
    if (!uniform) {
        for (int y = 0; y < h; ++y) {
            const bool yborder = y < r || y >= h - r;
            if (yborder) {
                for (int x = 0; x < w; ++x) solve_pixel(x, y);
            } else {
                for (int x = 0; x < r; ++x) solve_pixel(x, y);
                for (int x = w - r; x < w; ++x) solve_pixel(x, y);
            }
        }
    }

    // Border pixels are flagged low certainty in both modes.
    for (int y = 0; y < h; ++y) {
        const bool yborder = y < r || y >= h - r;
        for (int x = 0; x < w; ++x)
            out.low[static_cast<std::size_t>(y) * w + x] =
                (yborder || x < r || x >= w - r) ? 1 : 0;
    }
}

} // namespace aquaflow::detail
