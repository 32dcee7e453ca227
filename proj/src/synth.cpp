#include "aquaflow/synth.hpp"

#include <algorithm>
#include <cmath>

namespace aquaflow {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// splitmix64; hand-rolled so rendered scenes are bit-identical across
// platforms and standard library versions.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; } // [0,1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
};

// Band-limited texture: a fixed sum of random sinusoids, exactly evaluable at
// any real coordinate, so subpixel motion needs no resampling.
struct Texture {
    struct Component {
        double fx, fy, phase, amp;
    };
    std::vector<Component> comps;
    double gain = 1.0;

    explicit Texture(Rng& rng, int count = 32) {
        comps.resize(count);
        double power = 0.0;
        for (auto& c : comps) {
            const double freq = std::exp(rng.uniform(std::log(0.05), std::log(0.18)));
            const double dir = rng.uniform(0.0, kTwoPi);
            c.fx = kTwoPi * freq * std::cos(dir);
            c.fy = kTwoPi * freq * std::sin(dir);
            c.phase = rng.uniform(0.0, kTwoPi);
            c.amp = rng.uniform(0.7, 1.3);
            power += 0.5 * c.amp * c.amp;
        }
        gain = 45.0 / std::sqrt(power); // target stddev ~45 around the bias
    }

    double operator()(double x, double y) const {
        double v = 0.0;
        for (const auto& c : comps) v += c.amp * std::sin(c.fx * x + c.fy * y + c.phase);
        return 128.0 + gain * v;
    }
};

std::uint8_t quantize(double v) {
    const long q = std::lround(v);
    return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

void set_gray(RgbFrame& f, int x, int y, double v) {
    std::uint8_t* p = f.pixel(x, y);
    p[0] = p[1] = p[2] = quantize(v);
}

std::vector<std::pair<double, double>> default_waypoints(const SceneSpec& s) {
    return {{0.18 * s.width, 0.72 * s.height}, {0.82 * s.width, 0.72 * s.height}};
}

std::pair<double, double> path_position(const std::vector<std::pair<double, double>>& wps,
                                        int frame, int frame_count) {
    if (wps.size() == 1 || frame_count <= 1) return wps.front();
    const double s = static_cast<double>(frame) / (frame_count - 1) * (wps.size() - 1);
    const std::size_t seg = std::min(static_cast<std::size_t>(s), wps.size() - 2);
    const double f = s - seg;
    return {wps[seg].first + f * (wps[seg + 1].first - wps[seg].first),
            wps[seg].second + f * (wps[seg + 1].second - wps[seg].second)};
}

// Rising achromatic disks, wrapping inside a band in the upper part of the
// frame, well away from the default blob path.
struct Bubbles {
    std::vector<double> columns;
    std::vector<double> phase;
    double y_lo, y_hi;
    double radius = 4.0;
    double speed = 2.0;

    Bubbles(const SceneSpec& s, Rng& rng) {
        y_lo = 0.08 * s.height;
        y_hi = 0.36 * s.height;
        const int ncols = std::max(2, s.width / 56);
        for (int i = 0; i < ncols; ++i) {
            columns.push_back((i + 0.5) / ncols * s.width);
            phase.push_back(rng.uniform(0.0, y_hi - y_lo));
        }
    }

    // stamp every disk for frame t; returns drawn pixels in mask
    void draw(RgbFrame& f, int t, std::vector<std::uint8_t>& mask) const {
        const double band = y_hi - y_lo;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const double cy = y_hi - std::fmod(phase[j] + speed * t, band);
            const double cx = columns[j];
            const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
            const int x1 = std::min(f.width - 1, static_cast<int>(std::ceil(cx + radius)));
            const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
            const int y1 = std::min(f.height - 1, static_cast<int>(std::ceil(cy + radius)));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const double d2 =
                        (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    if (d2 <= radius * radius) {
                        set_gray(f, x, y, 244.0);
                        mask[static_cast<std::size_t>(y) * f.width + x] = 1;
                    }
                }
        }
    }
};

} // namespace

std::pair<double, double> blob_center(const SceneSpec& spec, int frame) {
    const auto wps = spec.waypoints.empty() ? default_waypoints(spec) : spec.waypoints;
    return path_position(wps, frame, spec.frame_count);
}

RenderedScene render(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.frame_count < 1)
        throw Error("render: invalid scene dimensions");
    const int w = spec.width;
    const int h = spec.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    Rng rng(spec.seed);
    Texture tex(rng);
    const auto wps = spec.waypoints.empty() ? default_waypoints(spec) : spec.waypoints;
    Rng noise_rng(spec.seed ^ 0xa5a5a5a5a5a5a5a5ULL);

    const bool bubbles_scene = spec.kind == SceneSpec::Kind::bubbles_over_blob;

    RenderedScene out;
    out.frames.reserve(spec.frame_count);
    Bubbles bubbles(spec, rng);

    const double bg = 110.0;
    const double orange[3] = {235.0, 128.0, 20.0};
    const double cx0 = (w - 1) * 0.5;
    const double cy0 = (h - 1) * 0.5;

    for (int t = 0; t < spec.frame_count; ++t) {
        RgbFrame f(w, h);
        switch (spec.kind) {
        case SceneSpec::Kind::global_translate: {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double v = tex(x - spec.shift_x * t, y - spec.shift_y * t);
                    if (spec.noise_sigma > 0) v += spec.noise_sigma * noise_rng.normal();
                    set_gray(f, x, y, v);
                }
            break;
        }
        case SceneSpec::Kind::rigid_rotate: {
            const double a = -spec.angular_velocity * t;
            const double ca = std::cos(a), sa = std::sin(a);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double rx = x - cx0, ry = y - cy0;
                    double v = tex(cx0 + ca * rx - sa * ry, cy0 + sa * rx + ca * ry);
                    if (spec.noise_sigma > 0) v += spec.noise_sigma * noise_rng.normal();
                    set_gray(f, x, y, v);
                }
            break;
        }
        case SceneSpec::Kind::moving_gaussian_blob:
        case SceneSpec::Kind::bubbles_over_blob: {
            const auto [bx, by] = path_position(wps, t, spec.frame_count);
            const double inv2s2 = 1.0 / (2.0 * spec.blob_sigma * spec.blob_sigma);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                    const double alpha = std::exp(-d2 * inv2s2);
                    const double noise =
                        spec.noise_sigma > 0 ? spec.noise_sigma * noise_rng.normal() : 0.0;
                    if (bubbles_scene) {
                        std::uint8_t* p = f.pixel(x, y);
                        p[0] = quantize(bg + alpha * (orange[0] - bg) + noise);
                        p[1] = quantize(bg + alpha * (orange[1] - bg) + noise);
                        p[2] = quantize(bg + alpha * (orange[2] - bg) + noise);
                    } else {
                        set_gray(f, x, y, bg + alpha * 95.0 + noise);
                    }
                }
            break;
        }
        }
        if (bubbles_scene) {
            std::vector<std::uint8_t> bubble(n, 0);
            bubbles.draw(f, t, bubble);
            // blob mask: where the chromatic profile survives 8-bit quantization
            std::vector<std::uint8_t> blob(n, 0);
            const auto [bx, by] = path_position(wps, t, spec.frame_count);
            const double rcut = 3.6 * spec.blob_sigma;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                    if (d2 <= rcut * rcut) blob[static_cast<std::size_t>(y) * w + x] = 1;
                }
            for (std::size_t i = 0; i < n; ++i)
                if (blob[i] && bubble[i]) bubble[i] = 0;
            out.blob_mask.push_back(std::move(blob));
            out.bubble_mask.push_back(std::move(bubble));
        }
        out.frames.push_back(std::move(f));
    }

    // exact ground truth between consecutive frames
    for (int t = 0; t + 1 < spec.frame_count; ++t) {
        FlowField truth(w, h);
        switch (spec.kind) {
        case SceneSpec::Kind::global_translate:
            for (std::size_t i = 0; i < n; ++i) {
                truth.dx[i] = spec.shift_x;
                truth.dy[i] = spec.shift_y;
            }
            break;
        case SceneSpec::Kind::rigid_rotate: {
            const double ca = std::cos(spec.angular_velocity);
            const double sa = std::sin(spec.angular_velocity);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double rx = x - cx0, ry = y - cy0;
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    truth.dx[i] = (ca * rx - sa * ry) - rx;
                    truth.dy[i] = (sa * rx + ca * ry) - ry;
                }
            break;
        }
        case SceneSpec::Kind::moving_gaussian_blob:
        case SceneSpec::Kind::bubbles_over_blob: {
            const auto [bx, by] = path_position(wps, t, spec.frame_count);
            const auto [nx, ny] = path_position(wps, t + 1, spec.frame_count);
            const double support = 3.5 * spec.blob_sigma;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                    if (d2 <= support * support) {
                        const std::size_t i = static_cast<std::size_t>(y) * w + x;
                        truth.dx[i] = nx - bx;
                        truth.dy[i] = ny - by;
                    }
                }
            break;
        }
        }
        out.truth.push_back(std::move(truth));
    }
    return out;
}

EndpointError endpoint_error(const FlowField& flow, const FlowField& truth, int interior_margin) {
    require_same_dims(flow.width, flow.height, truth.width, truth.height, "endpoint_error");
    std::vector<double> errs;
    errs.reserve(static_cast<std::size_t>(flow.width) * flow.height);
    for (int y = interior_margin; y < flow.height - interior_margin; ++y)
        for (int x = interior_margin; x < flow.width - interior_margin; ++x) {
            const std::size_t i = flow.index(x, y);
            if (!flow.valid[i]) continue;
            const double ex = flow.dx[i] - truth.dx[i];
            const double ey = flow.dy[i] - truth.dy[i];
            errs.push_back(std::sqrt(ex * ex + ey * ey));
        }
    if (errs.empty()) throw Error("endpoint_error: no valid interior pixels");
    EndpointError out;
    double sum = 0.0;
    for (double e : errs) sum += e;
    out.mean = sum / errs.size();
    const std::size_t mid = errs.size() / 2;
    std::nth_element(errs.begin(), errs.begin() + mid, errs.end());
    out.median = errs[mid];
    const std::size_t i95 = static_cast<std::size_t>(0.95 * (errs.size() - 1));
    std::nth_element(errs.begin(), errs.begin() + i95, errs.end());
    out.p95 = errs[i95];
    return out;
}

} // namespace aquaflow
