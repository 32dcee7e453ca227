#include "aquaflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "aquaflow/imgproc.hpp"

#include "flow_internal.hpp"

namespace aquaflow {
namespace {

constexpr std::int64_t kOpenEnd = std::numeric_limits<std::int64_t>::max();

ScalarField preprocess_frame(DecodedFrame&& df, SessionConfig::Preprocess mode) {
    if (std::holds_alternative<RgbFrame>(df.image)) {
        const RgbFrame& rgb = std::get<RgbFrame>(df.image);
        return mode == SessionConfig::Preprocess::chroma_diff ? chroma_difference(rgb)
                                                              : luma_field(rgb);
    }
    if (std::holds_alternative<YuvFrame>(df.image)) {
        const YuvFrame& yuv = std::get<YuvFrame>(df.image);
        return mode == SessionConfig::Preprocess::chroma_diff ? chroma_difference(yuv)
                                                              : luma_field(yuv);
    }
    if (mode == SessionConfig::Preprocess::chroma_diff)
        throw Error("source frame " + std::to_string(df.index) +
                    " carries luma only; chroma-diff preprocessing needs color input "
                    "(use preprocess=luma)");
    return std::move(std::get<ScalarField>(df.image));
}

struct WorkerState {
    std::unique_ptr<DispersionGrid> grid;
    std::unique_ptr<MotionHistogram> hist;
    ScalarField gated{0, 0, FieldKind::magnitude}; // reused pair buffers
    ScalarField angle{0, 0, FieldKind::angle};
    std::int64_t gated_pixels = 0;
    double gated_mass = 0.0;
    std::int64_t frames_seen = 0; // retained frames this worker decoded
    std::int64_t pairs_done = 0;
};

constexpr double kPi = 3.14159265358979323846;

// Processes one pair's flow into the worker accumulators. Magnitude, gating
// and angle are computed in one pass (same values the magnitude_angle /
// apply_tolerance ops produce; the angle is only ever read at gated pixels).
void accumulate_pair(const FlowField& flow, double tol, const SessionConfig& cfg,
                     WorkerState& st) {
    const std::size_t n = flow.dx.size();
    st.gated.width = st.angle.width = flow.width;
    st.gated.height = st.angle.height = flow.height;
    st.gated.data.resize(n);
    st.angle.data.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double dx = flow.dx[p];
        const double dy = flow.dy[p];
        const double m = std::sqrt(dx * dx + dy * dy);
        if (m >= tol && m > 0.0) {
            st.gated.data[p] = m;
            double a = std::atan2(dy, dx);
            if (a == -kPi) a = kPi;
            st.angle.data[p] = a;
            ++st.gated_pixels;
            st.gated_mass += m;
        } else {
            st.gated.data[p] = 0.0;
            st.angle.data[p] = 0.0;
        }
    }
    if (!st.grid) {
        st.grid = std::make_unique<DispersionGrid>(cfg.grid_rows, cfg.grid_cols, flow.width,
                                                   flow.height);
        st.hist = std::make_unique<MotionHistogram>(cfg.mag_bins, cfg.angle_bins, cfg.mag_max);
    }
    st.grid->accumulate(st.gated);
    st.hist->accumulate(st.gated, st.angle);
    ++st.pairs_done;
}

// Worker over retained-frame ordinals [first_ord, last_ord]; completes pairs
// (first_ord, first_ord+1) .. (last_ord-1, last_ord). Returns early if the
// stream runs out.
void run_range(FrameReader& reader, std::int64_t window_start, std::int64_t stride,
               std::int64_t first_ord, std::int64_t last_ord, double tol,
               const SessionConfig& cfg, WorkerState& st) {
    detail::StreamingFlowEngine engine(cfg.expansion, cfg.flow);
    for (std::int64_t ord = first_ord; ord <= last_ord; ++ord) {
        const std::int64_t idx = window_start + stride * ord;
        reader.seek(idx);
        std::optional<DecodedFrame> df = reader.next();
        if (!df) break;
        const ScalarField field = preprocess_frame(std::move(*df), cfg.preprocess);
        ++st.frames_seen;
        std::optional<FlowField> flow = engine.push(field);
        if (flow) accumulate_pair(*flow, tol, cfg, st);
    }
}

std::string window_name(std::int64_t start, std::int64_t end) {
    std::ostringstream ss;
    ss << "win_" << start << "-" << end;
    return ss.str();
}

std::string format_num(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

std::map<std::string, std::string> echo_config(const SessionConfig& c, double tol_used,
                                               int threads) {
    std::map<std::string, std::string> m;
    m["input"] = c.source.path.string();
    m["source_kind"] = c.source.kind == FrameSource::Kind::yuv4mpeg ? "y4m" : "sequence";
    m["fps"] = format_num(c.source.fps);
    m["preprocess"] = c.preprocess == SessionConfig::Preprocess::chroma_diff ? "chroma-diff" : "luma";
    m["tol"] = format_num(tol_used);
    m["tol_auto"] = c.tol_auto ? "1" : "0";
    m["stride"] = std::to_string(c.frame_stride);
    m["grid_rows"] = std::to_string(c.grid_rows);
    m["grid_cols"] = std::to_string(c.grid_cols);
    m["mag_bins"] = std::to_string(c.mag_bins);
    m["angle_bins"] = std::to_string(c.angle_bins);
    m["mag_max"] = format_num(c.mag_max);
    m["window_radius"] = std::to_string(c.expansion.window_radius);
    m["applicability_sigma"] = format_num(c.expansion.applicability_sigma);
    m["certainty"] =
        c.expansion.certainty == ExpansionParams::Certainty::uniform ? "uniform" : "border";
    m["aggregation_sigma"] = format_num(c.flow.aggregation_sigma);
    m["regularization_eps"] = format_num(c.flow.regularization_eps);
    m["iterations"] = std::to_string(c.flow.iterations);
    m["pyramid_levels"] = std::to_string(c.flow.pyramid_levels);
    m["pyramid_scale"] = format_num(c.flow.pyramid_scale);
    m["threads"] = std::to_string(threads);
    std::ostringstream ws;
    for (std::size_t i = 0; i < c.windows.size(); ++i) {
        if (i) ws << ",";
        ws << c.windows[i].start << ":"
           << (c.windows[i].end < 0 ? std::string("end") : std::to_string(c.windows[i].end));
    }
    m["windows"] = ws.str();
    return m;
}

double median_of(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

double auto_tolerance(const SessionConfig& cfg, std::int64_t start, std::int64_t end) {
    auto reader = FrameReader::open(cfg.source);
    detail::StreamingFlowEngine engine(cfg.expansion, cfg.flow);
    std::vector<double> mags;
    std::int64_t pairs = 0;
    for (std::int64_t ord = 0;; ++ord) {
        const std::int64_t idx = start + cfg.frame_stride * ord;
        if (idx >= end || pairs >= cfg.tol_auto_pairs) break;
        reader->seek(idx);
        std::optional<DecodedFrame> df = reader->next();
        if (!df) break;
        const ScalarField field = preprocess_frame(std::move(*df), cfg.preprocess);
        std::optional<FlowField> flow = engine.push(field);
        if (!flow) continue;
        ++pairs;
        const auto [mag, ang] = magnitude_angle(*flow);
        for (std::size_t i = 0; i < mag.data.size(); ++i)
            if (flow->valid[i]) mags.push_back(mag.data[i]);
    }
    if (mags.empty()) return cfg.tol.tol;
    const double med = median_of(mags);
    for (double& m : mags) m = std::abs(m - med);
    const double mad = median_of(mags);
    return med + 3.0 * mad;
}

void validate(const SessionConfig& cfg) {
    if (cfg.frame_stride < 1) throw Error("run_session: frame_stride must be >= 1");
    if (cfg.tol_auto_pairs < 1) throw Error("run_session: tol_auto_pairs must be >= 1");
    for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
        const WindowSpec& w = cfg.windows[i];
        if (w.start < 0) throw Error("run_session: window start must be >= 0");
        if (w.end >= 0 && w.end <= w.start)
            throw Error("run_session: window end must exceed start");
        if (i && cfg.windows[i - 1].start > w.start)
            throw Error("run_session: windows must be ordered by start frame");
    }
}

} // namespace

SessionReport run_session(const SessionConfig& cfg) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    auto probe = FrameReader::open(cfg.source);
    const bool seekable = probe->seekable();
    std::int64_t total = probe->frame_count();
    if (total < 0 && seekable) {
        probe->seek(kOpenEnd);
        total = probe->position();
        probe->seek(0);
    }

    std::vector<WindowSpec> windows = cfg.windows;
    if (windows.empty()) windows.push_back(WindowSpec{0, -1});
    if (!seekable) {
        if (cfg.tol_auto) throw Error("run_session: tol_auto needs a seekable source");
        for (std::size_t i = 1; i < windows.size(); ++i) {
            if (windows[i - 1].end < 0 || windows[i].start < windows[i - 1].end)
                throw Error("run_session: windows must not overlap on a non-seekable source");
        }
    }

    const int threads = cfg.threads > 0
                            ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());

    double tol = cfg.tol.tol;
    if (cfg.tol_auto) {
        const std::int64_t w0start = windows.front().start;
        const std::int64_t w0end = windows.front().end < 0
                                       ? (total >= 0 ? total : kOpenEnd)
                                       : std::min<std::int64_t>(windows.front().end,
                                                                total >= 0 ? total : kOpenEnd);
        tol = auto_tolerance(cfg, w0start, w0end);
    }

    SessionReport report;
    report.tol_used = tol;
    report.config_echo = echo_config(cfg, tol, threads);

    for (const WindowSpec& wspec : windows) {
        const std::int64_t start = wspec.start;
        std::int64_t end = wspec.end < 0 ? (total >= 0 ? total : kOpenEnd) : wspec.end;
        if (total >= 0) end = std::min(end, total);

        std::vector<WorkerState> states;
        std::string win_label = window_name(start, end == kOpenEnd ? -1 : end);
        try {
            if (seekable) {
                const std::int64_t span = std::max<std::int64_t>(0, end - start);
                const std::int64_t retained =
                    span == 0 ? 0 : (span + cfg.frame_stride - 1) / cfg.frame_stride;
                const std::int64_t pairs = std::max<std::int64_t>(0, retained - 1);
                const int k = static_cast<int>(
                    std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(1, pairs)));
                states.resize(k);
                if (pairs > 0) {
                    std::vector<std::thread> pool;
                    std::vector<std::exception_ptr> errors(k);
                    for (int w = 0; w < k; ++w) {
                        const std::int64_t p0 = pairs * w / k;
                        const std::int64_t p1 = pairs * (w + 1) / k;
                        if (p0 >= p1) continue;
                        pool.emplace_back([&, w, p0, p1] {
                            try {
                                auto reader = FrameReader::open(cfg.source);
                                run_range(*reader, start, cfg.frame_stride, p0, p1, tol, cfg,
                                          states[w]);
                            } catch (...) {
                                errors[w] = std::current_exception();
                            }
                        });
                    }
                    for (std::thread& t : pool) t.join();
                    for (const std::exception_ptr& e : errors)
                        if (e) std::rethrow_exception(e);
                } else if (retained > 0) {
                    // decode the lone frame so frames_retained reports it
                    run_range(*FrameReader::open(cfg.source), start, cfg.frame_stride, 0, 0, tol,
                              cfg, states[0]);
                }
            } else {
                states.resize(1);
                std::int64_t last_ord = kOpenEnd;
                if (end != kOpenEnd) {
                    const std::int64_t span = std::max<std::int64_t>(0, end - start);
                    const std::int64_t retained =
                        span == 0 ? 0 : (span + cfg.frame_stride - 1) / cfg.frame_stride;
                    if (retained == 0) { last_ord = -1; }
                    else last_ord = retained - 1;
                }
                if (last_ord >= 0)
                    run_range(*probe, start, cfg.frame_stride, 0, last_ord, tol, cfg, states[0]);
            }
        } catch (const Error& e) {
            throw Error(win_label + ": " + e.what());
        }

        // merge worker accumulators in worker order; count the shared boundary
        // frames between adjacent worker ranges only once
        WindowResult wr;
        wr.start_frame = start;
        wr.end_frame = end == kOpenEnd ? -1 : end;
        std::unique_ptr<DispersionGrid> grid;
        std::unique_ptr<MotionHistogram> hist;
        int active_workers = 0;
        for (WorkerState& st : states) {
            wr.pairs_processed += st.pairs_done;
            wr.gated_pixels += st.gated_pixels;
            wr.gated_mass += st.gated_mass;
            wr.frames_retained += st.frames_seen;
            if (st.frames_seen > 0) ++active_workers;
            if (st.grid) {
                if (!grid) {
                    grid = std::move(st.grid);
                    hist = std::move(st.hist);
                } else {
                    grid->merge(*st.grid);
                    hist->merge(*st.hist);
                }
            }
        }
        wr.frames_retained -= std::max(0, active_workers - 1); // shared boundaries
        if (!seekable && wr.end_frame < 0)
            wr.end_frame = start + (wr.frames_retained > 0
                                        ? (wr.frames_retained - 1) * cfg.frame_stride + 1
                                        : 0);
        wr.name = window_name(wr.start_frame, wr.end_frame);
        if (grid) {
            wr.dispersion_total = grid->total();
            wr.motion_count = hist->total();
            wr.dispersion_prob = grid->probabilities();
            wr.motion_prob = hist->probabilities();
        } else {
            wr.dispersion_prob = Matrix(cfg.grid_rows, cfg.grid_cols);
            wr.motion_prob = Matrix(cfg.mag_bins, cfg.angle_bins);
        }

        if (!cfg.out_dir.empty()) {
            const std::filesystem::path dir = cfg.out_dir / wr.name;
            std::filesystem::create_directories(dir);
            write_matrix_csv(wr.dispersion_prob, dir / "dispersion.csv");
            write_matrix_csv(wr.motion_prob, dir / "motion.csv");
            write_heatmap_pgm(wr.dispersion_prob, dir / "dispersion.pgm");
            write_heatmap_pgm(wr.motion_prob, dir / "motion.pgm");
        }
        report.windows.push_back(std::move(wr));
    }

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_report_json(report, cfg.out_dir / "report.json");
        // wall-clock time lives outside report.json so report bytes reproduce
        std::ofstream timing(cfg.out_dir / "timing.txt");
        timing << "elapsed_seconds=" << report.elapsed_seconds << "\n";
    }
    return report;
}

} // namespace aquaflow
