#include "aquaflow/polyexp.hpp"

#include <cmath>

#include "expansion_core.hpp"

namespace aquaflow {

PolyCoeffField polynomial_expansion(const ScalarField& field, const ExpansionParams& params) {
    PolyCoeffField out;
    ExpansionScratch scratch;
    polynomial_expansion_into(field, params, out, scratch);
    return out;
}

void polynomial_expansion_into(const ScalarField& field, const ExpansionParams& params,
                               PolyCoeffField& out, ExpansionScratch& scratch) {
    const int w = field.width;
    const int h = field.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    out.width = w;
    out.height = h;
    out.a11.resize(n);
    out.a12.resize(n);
    out.a22.resize(n);
    out.b1.resize(n);
    out.b2.resize(n);
    out.c.resize(n);
    out.low_certainty.resize(n);

    detail::CoeffSpans<double> spans{out.a11.data(), out.a12.data(), out.a22.data(),
                                     out.b1.data(),  out.b2.data(),  out.c.data(),
                                     out.low_certainty.data()};
    detail::expand_core<double>(field.data.data(), w, h, params, spans, scratch.tx, scratch.s);
}

PolyCoeffs dense_lsq_oracle(const ScalarField& field, const ExpansionParams& params, int px,
                            int py) {
    detail::check_expansion_input(field.width, field.height, params);
    const int r = params.window_radius;
    if (px < r || py < r || px >= field.width - r || py >= field.height - r)
        throw Error("dense_lsq_oracle: pixel must be at least window_radius from every border");

    const std::vector<double> k = detail::gaussian_kernel<double>(params.applicability_sigma, r);

    // direct accumulation of the 6x6 weighted normal equations
    double g[6][6] = {};
    double rhs[6] = {};
    for (int v = -r; v <= r; ++v) {
        for (int u = -r; u <= r; ++u) {
            const double wgt = k[u + r] * k[v + r];
            const double x = u, y = v;
            const double basis[6] = {1.0, x, y, x * x, y * y, x * y};
            const double f = field.at(px + u, py + v);
            for (int i = 0; i < 6; ++i) {
                rhs[i] += wgt * f * basis[i];
                for (int j = i; j < 6; ++j) g[i][j] += wgt * basis[i] * basis[j];
            }
        }
    }
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < i; ++j) g[i][j] = g[j][i];

    // Gauss-Jordan with partial pivoting, kept deliberately different from the
    // Cholesky route used by polynomial_expansion.
    double aug[6][7];
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) aug[i][j] = g[i][j];
        aug[i][6] = rhs[i];
    }
    PolyCoeffs out;
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int row = col + 1; row < 6; ++row)
            if (std::abs(aug[row][col]) > std::abs(aug[piv][col])) piv = row;
        if (std::abs(aug[piv][col]) < 1e-300) {
            out.degenerate = true;
            double mass = 0.0, mean = 0.0;
            for (int v = -r; v <= r; ++v)
                for (int u = -r; u <= r; ++u) {
                    const double wgt = k[u + r] * k[v + r];
                    mass += wgt;
                    mean += wgt * field.at(px + u, py + v);
                }
            out.c = mass > 0 ? mean / mass : 0.0;
            return out;
        }
        if (piv != col)
            for (int j = col; j < 7; ++j) std::swap(aug[piv][j], aug[col][j]);
        const double inv = 1.0 / aug[col][col];
        for (int j = col; j < 7; ++j) aug[col][j] *= inv;
        for (int row = 0; row < 6; ++row) {
            if (row == col) continue;
            const double f = aug[row][col];
            if (f == 0.0) continue;
            for (int j = col; j < 7; ++j) aug[row][j] -= f * aug[col][j];
        }
    }
    out.c = aug[0][6];
    out.b1 = aug[1][6];
    out.b2 = aug[2][6];
    out.a11 = aug[3][6];
    out.a22 = aug[4][6];
    out.a12 = 0.5 * aug[5][6];
    return out;
}

} // namespace aquaflow
