#include "aquaflow/flow.hpp"

#include <cmath>

#include "expansion_core.hpp"
#include "flow_internal.hpp"
#include "kernels.hpp"

namespace aquaflow {
namespace {

constexpr double kPi = 3.14159265358979323846;

// round half away from zero (lround semantics) without the libm call
template <class Real>
inline int round_to_int(Real v) {
    return static_cast<int>(v >= 0 ? v + Real(0.5) : v - Real(0.5));
}

void check_flow_params(const FlowParams& p) {
    if (!(p.aggregation_sigma > 0)) throw Error("flow: aggregation_sigma must be > 0");
    if (p.regularization_eps < 0) throw Error("flow: regularization_eps must be >= 0");
    if (p.iterations < 1) throw Error("flow: iterations must be >= 1");
    if (p.pyramid_levels < 1) throw Error("flow: pyramid_levels must be >= 1");
    if (!(p.pyramid_scale > 0 && p.pyramid_scale < 1))
        throw Error("flow: pyramid_scale must be in (0, 1)");
}

// non-owning view of one frame's coefficient planes
template <class Real>
struct CoeffView {
    const Real *a11, *a12, *a22, *b1, *b2, *c;
    const std::uint8_t* low;
    int w, h;
};

// owned coefficient planes for pyramid levels
template <class Real>
struct CoeffBuf {
    int w = 0, h = 0;
    std::vector<Real> a11, a12, a22, b1, b2, c;
    std::vector<std::uint8_t> low;

    void resize(int W, int H) {
        w = W;
        h = H;
        const std::size_t n = static_cast<std::size_t>(W) * H;
        a11.resize(n);
        a12.resize(n);
        a22.resize(n);
        b1.resize(n);
        b2.resize(n);
        c.resize(n);
        low.resize(n);
    }
    detail::CoeffSpans<Real> spans() {
        return {a11.data(), a12.data(), a22.data(), b1.data(), b2.data(), c.data(), low.data()};
    }
    CoeffView<Real> view() const {
        return {a11.data(), a12.data(), a22.data(), b1.data(), b2.data(),
                c.data(),   low.data(), w,          h};
    }
};

template <class Real>
struct FlowBuf {
    int w = 0, h = 0;
    std::vector<Real> dx, dy;
    std::vector<std::uint8_t> valid;

    void resize(int W, int H) {
        w = W;
        h = H;
        const std::size_t n = static_cast<std::size_t>(W) * H;
        dx.resize(n);
        dy.resize(n);
        valid.resize(n);
    }
    void fill_zero() {
        std::fill(dx.begin(), dx.end(), Real(0));
        std::fill(dy.begin(), dy.end(), Real(0));
        std::fill(valid.begin(), valid.end(), std::uint8_t(1));
    }
};

// Reused working memory for one flow pair. Buffers are resized per level;
// capacity sticks at the finest level after the first pair, so the hot path
// stops allocating.
template <class Real>
struct PairScratch {
    std::vector<Real> g11, g12, g22, h1, h2, tmp, agg;
    FlowBuf<Real> a, b, prior;

    void size_planes(std::size_t n) {
        g11.resize(n);
        g12.resize(n);
        g22.resize(n);
        h1.resize(n);
        h2.resize(n);
    }
};

// One fixed-point pass of the averaged-form solve: prior in, next out.
template <class Real>
void practical_pass(const CoeffView<Real>& ct, const CoeffView<Real>& ct1,
                    const FlowBuf<Real>& prior, const FlowParams& params,
                    const std::vector<Real>& kernel, int kr, PairScratch<Real>& s,
                    FlowBuf<Real>& out) {
    const int w = ct.w;
    const int h = ct.h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    s.size_planes(n);
    out.resize(w, h);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            int qx = x + round_to_int(prior.dx[p]);
            int qy = y + round_to_int(prior.dy[p]);
            qx = qx < 0 ? 0 : (qx >= w ? w - 1 : qx);
            qy = qy < 0 ? 0 : (qy >= h ? h - 1 : qy);
            const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
            const Real drx = static_cast<Real>(qx - x);
            const Real dry = static_cast<Real>(qy - y);

            const Real a11 = Real(0.5) * (ct.a11[p] + ct1.a11[q]);
            const Real a12 = Real(0.5) * (ct.a12[p] + ct1.a12[q]);
            const Real a22 = Real(0.5) * (ct.a22[p] + ct1.a22[q]);
            const Real db1 = Real(0.5) * (ct.b1[p] - ct1.b1[q]) + a11 * drx + a12 * dry;
            const Real db2 = Real(0.5) * (ct.b2[p] - ct1.b2[q]) + a12 * drx + a22 * dry;

            const Real cert = (ct.low[p] || ct1.low[q]) ? Real(0) : Real(1);
            s.g11[p] = cert * (a11 * a11 + a12 * a12);
            s.g12[p] = cert * (a11 * a12 + a12 * a22);
            s.g22[p] = cert * (a12 * a12 + a22 * a22);
            s.h1[p] = cert * (a11 * db1 + a12 * db2);
            s.h2[p] = cert * (a12 * db1 + a22 * db2);
        }
    }

    // Gaussian aggregation of the normal equations (no votes outside the image).
    s.tmp.resize(n);
    s.agg.resize(n);
    auto blur = [&](std::vector<Real>& plane) {
        detail::correlate_x(plane.data(), w, h, kernel.data(), kr, detail::Pad::zero,
                            s.tmp.data());
        detail::correlate_y(s.tmp.data(), w, h, kernel.data(), kr, detail::Pad::zero,
                            s.agg.data());
        plane.swap(s.agg);
    };
    blur(s.g11);
    blur(s.g12);
    blur(s.g22);
    blur(s.h1);
    blur(s.h2);

    const Real eps = static_cast<Real>(params.regularization_eps);
    for (std::size_t p = 0; p < n; ++p) {
        const Real mu = Real(0.5) * (s.g11[p] + s.g22[p]);
        if (!(mu > 0)) { // nothing voted here (exactly flat neighborhood)
            out.dx[p] = 0;
            out.dy[p] = 0;
            out.valid[p] = 0;
            continue;
        }
        const Real m11 = s.g11[p] + eps;
        const Real m22 = s.g22[p] + eps;
        const Real det = m11 * m22 - s.g12[p] * s.g12[p];
        if (!(det > 0)) {
            out.dx[p] = 0;
            out.dy[p] = 0;
            out.valid[p] = 0;
            continue;
        }
        out.dx[p] = (m22 * s.h1[p] - s.g12[p] * s.h2[p]) / det;
        out.dy[p] = (m11 * s.h2[p] - s.g12[p] * s.h1[p]) / det;
        out.valid[p] = 1;
    }
}

// Runs the iterated solve with s.prior as the initial displacement; the result
// lands in one of the ping-pong buffers and is returned by reference.
template <class Real>
const FlowBuf<Real>& practical_iterations(const CoeffView<Real>& ct, const CoeffView<Real>& ct1,
                                          const FlowParams& params, PairScratch<Real>& s) {
    const int kr = detail::gaussian_radius(params.aggregation_sigma);
    const std::vector<Real> kernel = detail::gaussian_kernel<Real>(params.aggregation_sigma, kr);
    const FlowBuf<Real>* cur = &s.prior;
    FlowBuf<Real>* nxt = &s.a;
    for (int it = 0; it < params.iterations; ++it) {
        practical_pass(ct, ct1, *cur, params, kernel, kr, s, *nxt);
        cur = nxt;
        nxt = (nxt == &s.a) ? &s.b : &s.a;
    }
    return *cur;
}

template <class Real>
void downsample_into(const std::vector<Real>& in, int win, int hin, int wout, int hout,
                     double scale, std::vector<Real>& out, PairScratch<Real>& s) {
    const double sigma = 0.5 / scale;
    const int r = detail::gaussian_radius(sigma);
    const std::vector<Real> k = detail::gaussian_kernel<Real>(sigma, r);
    const std::size_t n = static_cast<std::size_t>(win) * hin;
    s.tmp.resize(n);
    s.agg.resize(n);
    detail::correlate_x(in.data(), win, hin, k.data(), r, detail::Pad::replicate, s.tmp.data());
    detail::correlate_y(s.tmp.data(), win, hin, k.data(), r, detail::Pad::replicate,
                        s.agg.data());

    out.resize(static_cast<std::size_t>(wout) * hout);
    const double sx = static_cast<double>(win) / wout;
    const double sy = static_cast<double>(hin) / hout;
    for (int y = 0; y < hout; ++y)
        for (int x = 0; x < wout; ++x)
            out[static_cast<std::size_t>(y) * wout + x] = static_cast<Real>(detail::bilinear(
                s.agg.data(), win, hin, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5));
}

template <class Real>
void upsample_flow_into(const FlowBuf<Real>& in, int wout, int hout, FlowBuf<Real>& out) {
    out.resize(wout, hout);
    const double sx = static_cast<double>(in.w) / wout;
    const double sy = static_cast<double>(in.h) / hout;
    const double gainx = static_cast<double>(wout) / in.w;
    const double gainy = static_cast<double>(hout) / in.h;
    for (int y = 0; y < hout; ++y) {
        for (int x = 0; x < wout; ++x) {
            const double cx = (x + 0.5) * sx - 0.5;
            const double cy = (y + 0.5) * sy - 0.5;
            const std::size_t i = static_cast<std::size_t>(y) * wout + x;
            out.dx[i] = static_cast<Real>(gainx * detail::bilinear(in.dx.data(), in.w, in.h, cx, cy));
            out.dy[i] = static_cast<Real>(gainy * detail::bilinear(in.dy.data(), in.w, in.h, cx, cy));
            out.valid[i] = 1;
        }
    }
}

struct LevelDims {
    int w, h;
};

std::vector<LevelDims> pyramid_dims(int w, int h, const ExpansionParams& ep,
                                    const FlowParams& fp) {
    std::vector<LevelDims> dims(fp.pyramid_levels);
    dims[0] = {w, h};
    for (int l = 1; l < fp.pyramid_levels; ++l) {
        dims[l] = {std::max(1, static_cast<int>(std::lround(dims[l - 1].w * fp.pyramid_scale))),
                   std::max(1, static_cast<int>(std::lround(dims[l - 1].h * fp.pyramid_scale)))};
    }
    const LevelDims& c = dims.back();
    if (c.w <= 2 * ep.window_radius || c.h <= 2 * ep.window_radius)
        throw FrameTooSmall("pyramid_flow: coarsest level " + std::to_string(c.w) + "x" +
                            std::to_string(c.h) + " too small for window radius " +
                            std::to_string(ep.window_radius) + " (" +
                            std::to_string(fp.pyramid_levels) + " levels)");
    return dims;
}

template <class Real>
struct FramePyr {
    std::vector<LevelDims> dims;
    std::vector<std::vector<Real>> fields; // [0] finest
    std::vector<CoeffBuf<Real>> coeffs;
};

template <class Real>
void build_pyramid_into(const ScalarField& frame, const std::vector<LevelDims>& dims,
                        const ExpansionParams& ep, double scale, FramePyr<Real>& p,
                        PairScratch<Real>& s, std::vector<Real> (&tx)[3],
                        std::vector<Real> (&sm)[6]) {
    p.dims = dims;
    p.fields.resize(dims.size());
    p.coeffs.resize(dims.size());
    p.fields[0].resize(frame.data.size());
    for (std::size_t i = 0; i < frame.data.size(); ++i)
        p.fields[0][i] = static_cast<Real>(frame.data[i]);
    for (std::size_t l = 1; l < dims.size(); ++l)
        downsample_into(p.fields[l - 1], dims[l - 1].w, dims[l - 1].h, dims[l].w, dims[l].h,
                        scale, p.fields[l], s);
    for (std::size_t l = 0; l < dims.size(); ++l) {
        p.coeffs[l].resize(dims[l].w, dims[l].h);
        detail::expand_core<Real>(p.fields[l].data(), dims[l].w, dims[l].h, ep,
                                  p.coeffs[l].spans(), tx, sm);
    }
}

// Coarse-to-fine over prebuilt pyramids; the finest flow is copied into a
// double FlowField with the border band invalidated.
template <class Real>
FlowField coarse_to_fine(const FramePyr<Real>& pt, const FramePyr<Real>& pt1,
                         const ExpansionParams& ep, const FlowParams& fp, PairScratch<Real>& s) {
    const int levels = static_cast<int>(pt.fields.size());
    const FlowBuf<Real>* result = nullptr;
    for (int l = levels - 1; l >= 0; --l) {
        const int w = pt.dims[l].w;
        const int h = pt.dims[l].h;
        if (l == levels - 1) {
            s.prior.resize(w, h);
            s.prior.fill_zero();
        } else {
            // result points at a ping-pong buffer; prior is distinct from both
            upsample_flow_into(*result, w, h, s.prior);
        }
        result = &practical_iterations(pt.coeffs[l].view(), pt1.coeffs[l].view(), fp, s);
    }

    FlowField flow(result->w, result->h);
    const int r = ep.window_radius;
    for (int y = 0; y < flow.height; ++y) {
        const bool yb = y < r || y >= flow.height - r;
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.index(x, y);
            // the border band has no trustworthy fit; report no motion there
            if (yb || x < r || x >= flow.width - r) {
                flow.dx[i] = 0.0;
                flow.dy[i] = 0.0;
                flow.valid[i] = 0;
            } else {
                flow.dx[i] = result->dx[i];
                flow.dy[i] = result->dy[i];
                flow.valid[i] = result->valid[i];
            }
        }
    }
    return flow;
}

// Shared engine body; Real selects the plane precision.
template <class Real>
struct EngineCore {
    ExpansionParams eparams;
    FlowParams fparams;
    FramePyr<Real> slots[2];
    PairScratch<Real> scratch;
    std::vector<Real> etx[3], esm[6];
    int prev = -1; // slot holding the previous frame, -1 if none

    EngineCore(ExpansionParams ep, FlowParams fp) : eparams(ep), fparams(fp) {
        check_flow_params(fp);
    }

    void reset() { prev = -1; }

    std::optional<FlowField> push(const ScalarField& frame) {
        const std::vector<LevelDims> dims =
            pyramid_dims(frame.width, frame.height, eparams, fparams);
        if (prev >= 0)
            require_same_dims(slots[prev].dims[0].w, slots[prev].dims[0].h, frame.width,
                              frame.height, "frames");
        const int cur = prev < 0 ? 0 : 1 - prev;
        build_pyramid_into(frame, dims, eparams, fparams.pyramid_scale, slots[cur], scratch, etx,
                           esm);
        std::optional<FlowField> out;
        if (prev >= 0)
            out = coarse_to_fine(slots[prev], slots[cur], eparams, fparams, scratch);
        prev = cur;
        return out;
    }
};

CoeffView<double> view_of(const PolyCoeffField& f) {
    return {f.a11.data(), f.a12.data(), f.a22.data(),         f.b1.data(), f.b2.data(),
            f.c.data(),   f.low_certainty.data(), f.width, f.height};
}

} // namespace

FlowField displacement_ideal(const PolyCoeffField& ct, const PolyCoeffField& ct1) {
    require_same_dims(ct.width, ct.height, ct1.width, ct1.height, "coefficient fields");
    FlowField out(ct.width, ct.height);
    const std::size_t n = static_cast<std::size_t>(ct.width) * ct.height;
    for (std::size_t p = 0; p < n; ++p) {
        const double det = ct.a11[p] * ct.a22[p] - ct.a12[p] * ct.a12[p];
        if (std::abs(det) < 1e-12) {
            out.dx[p] = out.dy[p] = 0.0;
            out.valid[p] = 0;
            continue;
        }
        const double r1 = 0.5 * (ct.b1[p] - ct1.b1[p]);
        const double r2 = 0.5 * (ct.b2[p] - ct1.b2[p]);
        out.dx[p] = (ct.a22[p] * r1 - ct.a12[p] * r2) / det;
        out.dy[p] = (ct.a11[p] * r2 - ct.a12[p] * r1) / det;
        out.valid[p] = 1;
    }
    return out;
}

FlowField displacement_practical(const PolyCoeffField& ct, const PolyCoeffField& ct1,
                                 const FlowField& prior, const FlowParams& params) {
    require_same_dims(ct.width, ct.height, ct1.width, ct1.height, "coefficient fields");
    check_flow_params(params);
    PairScratch<double> s;
    s.prior.resize(ct.width, ct.height);
    if (prior.width == 0 && prior.height == 0) {
        s.prior.fill_zero();
    } else {
        require_same_dims(ct.width, ct.height, prior.width, prior.height, "prior flow");
        s.prior.dx = prior.dx;
        s.prior.dy = prior.dy;
        s.prior.valid = prior.valid;
    }
    const FlowBuf<double>& res = practical_iterations(view_of(ct), view_of(ct1), params, s);
    FlowField out(ct.width, ct.height);
    out.dx = res.dx;
    out.dy = res.dy;
    out.valid = res.valid;
    return out;
}

FlowField pyramid_flow(const ScalarField& frame_t, const ScalarField& frame_t1,
                       const ExpansionParams& eparams, const FlowParams& fparams) {
    require_same_dims(frame_t.width, frame_t.height, frame_t1.width, frame_t1.height, "frames");
    EngineCore<double> core(eparams, fparams);
    core.push(frame_t);
    std::optional<FlowField> out = core.push(frame_t1);
    return std::move(*out);
}

std::pair<ScalarField, ScalarField> magnitude_angle(const FlowField& flow) {
    ScalarField mag(flow.width, flow.height, FieldKind::magnitude);
    ScalarField ang(flow.width, flow.height, FieldKind::angle);
    const std::size_t n = static_cast<std::size_t>(flow.width) * flow.height;
    for (std::size_t p = 0; p < n; ++p) {
        const double dx = flow.dx[p];
        const double dy = flow.dy[p];
        const double m = std::sqrt(dx * dx + dy * dy);
        mag.data[p] = m;
        if (m == 0.0) {
            ang.data[p] = 0.0;
        } else {
            double a = std::atan2(dy, dx);
            if (a == -kPi) a = kPi; // keep the range (-pi, pi]
            ang.data[p] = a;
        }
    }
    return {std::move(mag), std::move(ang)};
}

struct PyramidFlowEngine::Impl {
    EngineCore<double> core;
    Impl(ExpansionParams ep, FlowParams fp) : core(ep, fp) {}
};

PyramidFlowEngine::PyramidFlowEngine(ExpansionParams eparams, FlowParams fparams)
    : impl_(new Impl(eparams, fparams)) {}
PyramidFlowEngine::~PyramidFlowEngine() = default;
PyramidFlowEngine::PyramidFlowEngine(PyramidFlowEngine&&) noexcept = default;
PyramidFlowEngine& PyramidFlowEngine::operator=(PyramidFlowEngine&&) noexcept = default;

void PyramidFlowEngine::reset() { impl_->core.reset(); }

std::optional<FlowField> PyramidFlowEngine::push(const ScalarField& frame) {
    return impl_->core.push(frame);
}

namespace detail {

struct StreamingFlowEngine::Impl {
    EngineCore<float> core;
    Impl(ExpansionParams ep, FlowParams fp) : core(ep, fp) {}
};

StreamingFlowEngine::StreamingFlowEngine(ExpansionParams eparams, FlowParams fparams)
    : impl_(new Impl(eparams, fparams)) {}
StreamingFlowEngine::~StreamingFlowEngine() = default;
StreamingFlowEngine::StreamingFlowEngine(StreamingFlowEngine&&) noexcept = default;
StreamingFlowEngine& StreamingFlowEngine::operator=(StreamingFlowEngine&&) noexcept = default;

void StreamingFlowEngine::reset() { impl_->core.reset(); }

std::optional<FlowField> StreamingFlowEngine::push(const ScalarField& frame) {
    return impl_->core.push(frame);
}

} // namespace detail
} // namespace aquaflow
