#pragma once

#include "aquaflow/field.hpp"

namespace aquaflow {

/// Parameters of the local quadratic fit.
struct ExpansionParams {
    /// Half side of the fitting window; window side = 2*window_radius + 1.
    int window_radius = 5;
    /// Sigma of the isotropic Gaussian applicability weight, in pixels.
    double applicability_sigma = 1.5;
    /// How samples outside the image are treated. zero_outside_border gives
    /// them zero weight (the fit near edges uses in-image samples only);
    /// uniform gives every window sample weight 1 with out-of-image values
    /// read as 0, which keeps the normal matrix constant across the image.
    enum class Certainty { uniform, zero_outside_border };
    Certainty certainty = Certainty::zero_outside_border;
};

/// Per-pixel quadratic model f(w) ~ w'Aw + b'w + c in local coordinates
/// centered at the pixel (w = offset from the pixel, x right, y down).
/// A is symmetric; a12 stores both off-diagonal entries.
struct PolyCoeffField {
    int width = 0;
    int height = 0;
    std::vector<double> a11, a12, a22, b1, b2, c;
    /// Nonzero for pixels whose window extends past the image border, or whose
    /// normal equations were degenerate. These carry a best-effort fit and are
    /// excluded from analytics downstream.
    std::vector<std::uint8_t> low_certainty;

    PolyCoeffField() = default;
    PolyCoeffField(int w, int h)
        : width(w), height(h) {
        const std::size_t n = static_cast<std::size_t>(w) * h;
        a11.assign(n, 0.0);
        a12.assign(n, 0.0);
        a22.assign(n, 0.0);
        b1.assign(n, 0.0);
        b2.assign(n, 0.0);
        c.assign(n, 0.0);
        low_certainty.assign(n, 0);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Coefficients at a single pixel, as returned by the reference solver.
struct PolyCoeffs {
    double a11 = 0, a12 = 0, a22 = 0;
    double b1 = 0, b2 = 0;
    double c = 0;
    bool degenerate = false;
};

/// Gaussian-weighted least-squares fit of the local quadratic model at every
/// pixel, computed with separable correlations. Requires
/// width, height > 2*window_radius (throws FrameTooSmall otherwise).
/// Degenerate windows are flagged low_certainty and fall back to
/// (A = 0, b = 0, c = local weighted mean).
PolyCoeffField polynomial_expansion(const ScalarField& field, const ExpansionParams& params);

/// Reusable temporaries for polynomial_expansion_into; lets streaming callers
/// expand frame after frame without reallocating the moment planes.
struct ExpansionScratch {
    std::vector<double> tx[3];
    std::vector<double> s[6];
};

/// Same fit, writing into caller-owned storage.
void polynomial_expansion_into(const ScalarField& field, const ExpansionParams& params,
                               PolyCoeffField& out, ExpansionScratch& scratch);

/// Reference implementation: assembles and solves the dense 6x6 weighted
/// normal equations at one pixel by direct summation over the window.
/// The pixel must be at least window_radius away from every border.
PolyCoeffs dense_lsq_oracle(const ScalarField& field, const ExpansionParams& params, int px, int py);

} // namespace aquaflow
