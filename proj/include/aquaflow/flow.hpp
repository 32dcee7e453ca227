#pragma once

#include <memory>
#include <optional>

#include "aquaflow/field.hpp"
#include "aquaflow/polyexp.hpp"

namespace aquaflow {

struct FlowParams {
    /// Gaussian weight sigma (px) for aggregating the per-pixel flow equations
    /// over a neighborhood before solving.
    double aggregation_sigma = 7.0;
    /// Tikhonov term added to the diagonal of the aggregated 2x2 system.
    double regularization_eps = 1e-6;
    /// Fixed-point iterations of the displacement solve per pyramid level.
    int iterations = 3;
    /// Number of pyramid levels (1 = single scale).
    int pyramid_levels = 3;
    /// Per-level downsampling ratio, in (0, 1).
    double pyramid_scale = 0.5;
};

/// Closed-form single-pixel displacement d = 1/2 * A_t^-1 (b_t - b_t1).
/// Pixels whose quadratic term is numerically singular (|det A| < 1e-12) are
/// marked invalid and carry (0,0).
FlowField displacement_ideal(const PolyCoeffField& ct, const PolyCoeffField& ct1);

/// Averaged two-frame displacement: per pixel builds
///   A = (A_t(p) + A_t1(q)) / 2,  db = (b_t(p) - b_t1(q)) / 2 + A*(q - p)
/// with q = p + round(prior(p)), aggregates A'A and A'db over a Gaussian
/// neighborhood, adds regularization_eps to the diagonal and solves the 2x2
/// system. Runs params.iterations passes, feeding each result back as the
/// prior. Low-certainty coefficient pixels do not vote in the aggregation.
/// An empty prior (width 0) is treated as the zero field.
FlowField displacement_practical(const PolyCoeffField& ct, const PolyCoeffField& ct1,
                                 const FlowField& prior, const FlowParams& params);

/// Coarse-to-fine displacement between two frames. The returned field has the
/// border band (expansion window radius) zeroed and marked invalid; those
/// pixels carry no estimate and are skipped by the analytics stage.
FlowField pyramid_flow(const ScalarField& frame_t, const ScalarField& frame_t1,
                       const ExpansionParams& eparams, const FlowParams& fparams);

/// Per-pixel speed and direction. mag = sqrt(dx^2 + dy^2); angle is the
/// four-quadrant arctangent of (dy, dx) in (-pi, pi], defined as 0 where
/// mag == 0.
std::pair<ScalarField, ScalarField> magnitude_angle(const FlowField& flow);

/// Streaming form of pyramid_flow: keeps the previous frame's pyramid and
/// coefficient fields so consecutive pairs expand each frame only once.
/// push() returns the flow for (previous, frame), or nullopt on the first
/// frame after construction/reset. Results are identical to pyramid_flow on
/// each consecutive pair.
class PyramidFlowEngine {
public:
    PyramidFlowEngine(ExpansionParams eparams, FlowParams fparams);
    ~PyramidFlowEngine();
    PyramidFlowEngine(PyramidFlowEngine&&) noexcept;
    PyramidFlowEngine& operator=(PyramidFlowEngine&&) noexcept;

    void reset();
    std::optional<FlowField> push(const ScalarField& frame);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace aquaflow
