// aquaflow command line: session analysis, single-pair flow dumps and
// synthetic scene generation.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "aquaflow/imgproc.hpp"
#include "aquaflow/pipeline.hpp"
#include "aquaflow/synth.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using aquaflow::SessionConfig;

struct AnalyzeArgs {
    std::string input;
    std::string out;
    std::string source_kind = "auto"; // auto | sequence | y4m
    double fps = 0.0;
    std::string windows;              // "a:b,c:d"
    std::string window_unit = "frames";
    SessionConfig cfg;
    std::string preprocess = "chroma-diff";
    std::string certainty = "border";
};

std::vector<aquaflow::WindowSpec> parse_windows(const std::string& spec, const std::string& unit,
                                                double fps) {
    std::vector<aquaflow::WindowSpec> out;
    if (spec.empty()) return out;
    const bool seconds = unit == "seconds";
    if (seconds && fps <= 0)
        throw CLI::ValidationError("--windows", "time windows need --fps");
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--windows", "expected start:end, got '" + item + "'");
        const std::string a = item.substr(0, colon);
        const std::string b = item.substr(colon + 1);
        aquaflow::WindowSpec w;
        try {
            const double lo = a.empty() ? 0.0 : std::stod(a);
            const double hi = (b.empty() || b == "end") ? -1.0 : std::stod(b);
            w.start = static_cast<std::int64_t>(seconds ? std::floor(lo * fps) : lo);
            w.end = hi < 0 ? -1 : static_cast<std::int64_t>(seconds ? std::floor(hi * fps) : hi);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--windows", "bad window '" + item + "'");
        }
        out.push_back(w);
    }
    return out;
}

aquaflow::FrameSource make_source(const AnalyzeArgs& a) {
    aquaflow::FrameSource src;
    src.path = a.input;
    src.fps = a.fps;
    std::string kind = a.source_kind;
    if (kind == "auto") {
        if (a.input == "-" ||
            (a.input.size() > 4 && a.input.substr(a.input.size() - 4) == ".y4m"))
            kind = "y4m";
        else
            kind = "sequence";
    }
    src.kind = kind == "y4m" ? aquaflow::FrameSource::Kind::yuv4mpeg
                             : aquaflow::FrameSource::Kind::image_sequence;
    return src;
}

void add_flow_flags(CLI::App* app, AnalyzeArgs& a) {
    app->add_option("--window-radius", a.cfg.expansion.window_radius,
                    "polynomial expansion window radius (px)")
        ->capture_default_str();
    app->add_option("--applicability-sigma", a.cfg.expansion.applicability_sigma,
                    "Gaussian applicability sigma (px)")
        ->capture_default_str();
    app->add_option("--certainty", a.certainty, "border handling: border|uniform")
        ->check(CLI::IsMember({"border", "uniform"}))
        ->capture_default_str();
    app->add_option("--aggregation-sigma", a.cfg.flow.aggregation_sigma,
                    "Gaussian sigma for aggregating flow equations (px)")
        ->capture_default_str();
    app->add_option("--regularization-eps", a.cfg.flow.regularization_eps,
                    "Tikhonov term added to the aggregated 2x2 solve")
        ->capture_default_str();
    app->add_option("--iterations", a.cfg.flow.iterations, "solver iterations per level")
        ->capture_default_str();
    app->add_option("--pyramid-levels", a.cfg.flow.pyramid_levels, "number of pyramid levels")
        ->capture_default_str();
    app->add_option("--pyramid-scale", a.cfg.flow.pyramid_scale, "per-level downscale ratio")
        ->capture_default_str();
}

void apply_enums(AnalyzeArgs& a) {
    a.cfg.preprocess = a.preprocess == "luma" ? SessionConfig::Preprocess::luma
                                              : SessionConfig::Preprocess::chroma_diff;
    a.cfg.expansion.certainty = a.certainty == "uniform"
                                    ? aquaflow::ExpansionParams::Certainty::uniform
                                    : aquaflow::ExpansionParams::Certainty::zero_outside_border;
}

int run_analyze(AnalyzeArgs& a) {
    apply_enums(a);
    a.cfg.source = make_source(a);
    a.cfg.windows = parse_windows(a.windows, a.window_unit, a.fps);
    a.cfg.out_dir = a.out;
    const aquaflow::SessionReport report = aquaflow::run_session(a.cfg);
    std::cout << "tol used: " << report.tol_used << "\n";
    for (const auto& w : report.windows) {
        std::cout << w.name << ": frames " << w.frames_retained << ", pairs " << w.pairs_processed
                  << ", gated pixels " << w.gated_pixels << ", gated mass " << w.gated_mass
                  << "\n";
    }
    std::cout << "elapsed: " << report.elapsed_seconds << " s\n";
    if (!a.out.empty()) std::cout << "artifacts in " << a.out << "\n";
    return 0;
}

aquaflow::ScalarField load_for_flow(const std::string& path, const std::string& pre) {
    auto img = aquaflow::read_image(path);
    if (std::holds_alternative<aquaflow::ScalarField>(img)) {
        if (pre == "chroma-diff")
            throw aquaflow::Error(path + " is grayscale; chroma-diff needs color (use --pre luma)");
        return std::get<aquaflow::ScalarField>(img);
    }
    const aquaflow::YuvFrame yuv = aquaflow::rgb_to_yuv(std::get<aquaflow::RgbFrame>(img));
    if (pre == "luma") return aquaflow::luma_field(yuv);
    return aquaflow::chroma_difference(yuv);
}

int run_flow_pair(const std::string& patha, const std::string& pathb, const std::string& out,
                  const std::string& pre, AnalyzeArgs& a) {
    apply_enums(a);
    std::string mode = pre;
    if (mode == "auto") {
        const bool gray = std::holds_alternative<aquaflow::ScalarField>(aquaflow::read_image(patha));
        mode = gray ? "luma" : "chroma-diff";
    }
    const aquaflow::ScalarField fa = load_for_flow(patha, mode);
    const aquaflow::ScalarField fb = load_for_flow(pathb, mode);
    const aquaflow::FlowField flow =
        aquaflow::pyramid_flow(fa, fb, a.cfg.expansion, a.cfg.flow);
    const auto [mag, ang] = aquaflow::magnitude_angle(flow);

    std::filesystem::create_directories(out);
    auto dump = [&](const std::vector<double>& data, const char* name) {
        aquaflow::Matrix m(flow.height, flow.width);
        m.v = data;
        aquaflow::write_matrix_csv(m, std::filesystem::path(out) / name);
    };
    dump(flow.dx, "dx.csv");
    dump(flow.dy, "dy.csv");
    dump(mag.data, "mag.csv");
    dump(ang.data, "angle.csv");
    std::cout << "flow fields written to " << out << "\n";
    return 0;
}

struct SynthArgs {
    std::string kind = "translate";
    int width = 256, height = 256, frames = 2;
    double shift_x = 0.5, shift_y = 0.0;
    double omega = 0.02;
    double blob_sigma = 10.0;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::string waypoints; // "x0,y0;x1,y1"
    std::string out = "scene";
};

int run_synth(const SynthArgs& s) {
    aquaflow::SceneSpec spec;
    if (s.kind == "translate") spec.kind = aquaflow::SceneSpec::Kind::global_translate;
    else if (s.kind == "rotate") spec.kind = aquaflow::SceneSpec::Kind::rigid_rotate;
    else if (s.kind == "blob") spec.kind = aquaflow::SceneSpec::Kind::moving_gaussian_blob;
    else if (s.kind == "bubbles") spec.kind = aquaflow::SceneSpec::Kind::bubbles_over_blob;
    else throw aquaflow::Error("unknown scene kind '" + s.kind + "'");
    spec.width = s.width;
    spec.height = s.height;
    spec.frame_count = s.frames;
    spec.shift_x = s.shift_x;
    spec.shift_y = s.shift_y;
    spec.angular_velocity = s.omega;
    spec.blob_sigma = s.blob_sigma;
    spec.noise_sigma = s.noise;
    spec.seed = s.seed;
    if (!s.waypoints.empty()) {
        std::stringstream ss(s.waypoints);
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto comma = item.find(',');
            if (comma == std::string::npos)
                throw aquaflow::Error("bad waypoint '" + item + "' (expected x,y)");
            spec.waypoints.emplace_back(std::stod(item.substr(0, comma)),
                                        std::stod(item.substr(comma + 1)));
        }
    }

    const aquaflow::RenderedScene scene = aquaflow::render(spec);
    std::filesystem::create_directories(s.out);
    char name[64];
    for (std::size_t t = 0; t < scene.frames.size(); ++t) {
        std::snprintf(name, sizeof(name), "frame_%05zu.ppm", t);
        aquaflow::write_ppm(scene.frames[t], std::filesystem::path(s.out) / name);
    }
    for (std::size_t t = 0; t < scene.truth.size(); ++t) {
        aquaflow::Matrix mx(spec.height, spec.width), my(spec.height, spec.width);
        mx.v = scene.truth[t].dx;
        my.v = scene.truth[t].dy;
        std::snprintf(name, sizeof(name), "truth_%05zu_dx.csv", t);
        aquaflow::write_matrix_csv(mx, std::filesystem::path(s.out) / name);
        std::snprintf(name, sizeof(name), "truth_%05zu_dy.csv", t);
        aquaflow::write_matrix_csv(my, std::filesystem::path(s.out) / name);
    }
    std::cout << scene.frames.size() << " frames written to " << s.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aquaflow: dense optical-flow dispersion and motion analytics for fixed-camera video"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags override it");

    AnalyzeArgs a;
    CLI::App* analyze = app.add_subcommand("analyze", "run the full session pipeline");
    analyze->add_option("--input", a.input, "frame directory, .y4m file, or '-' for y4m on stdin")
        ->required();
    analyze->add_option("--out", a.out, "output directory (required for artifacts)")
        ->envname("AQUAFLOW_OUT");
    analyze->add_option("--source-kind", a.source_kind, "auto|sequence|y4m")
        ->check(CLI::IsMember({"auto", "sequence", "y4m"}))
        ->capture_default_str();
    analyze->add_option("--fps", a.fps, "frames per second (y4m header value used when 0)")
        ->capture_default_str();
    analyze->add_option("--tol", a.cfg.tol.tol, "motion tolerance (px/frame-pair)")
        ->capture_default_str();
    analyze->add_flag("--auto-tol", a.cfg.tol_auto, "estimate tol as median + 3*MAD over the first pairs");
    analyze->add_option("--auto-tol-pairs", a.cfg.tol_auto_pairs, "pairs sampled by --auto-tol")
        ->capture_default_str();
    analyze->add_option("--stride", a.cfg.frame_stride, "keep every Nth frame before pairing")
        ->capture_default_str();
    analyze->add_option("--windows", a.windows, "analysis windows 'a:b,c:d' ('end' for open end)");
    analyze->add_option("--window-unit", a.window_unit, "frames|seconds")
        ->check(CLI::IsMember({"frames", "seconds"}))
        ->capture_default_str();
    analyze->add_option("--grid-rows", a.cfg.grid_rows, "dispersion grid rows")
        ->capture_default_str();
    analyze->add_option("--grid-cols", a.cfg.grid_cols, "dispersion grid cols")
        ->capture_default_str();
    analyze->add_option("--mag-bins", a.cfg.mag_bins, "motion histogram magnitude bins")
        ->capture_default_str();
    analyze->add_option("--angle-bins", a.cfg.angle_bins, "motion histogram angle bins")
        ->capture_default_str();
    analyze->add_option("--mag-max", a.cfg.mag_max, "magnitude axis upper bound (px/frame-pair)")
        ->capture_default_str();
    analyze->add_option("--pre", a.preprocess, "preprocessing: chroma-diff|luma")
        ->check(CLI::IsMember({"chroma-diff", "luma"}))
        ->capture_default_str();
    analyze->add_option("--threads", a.cfg.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    add_flow_flags(analyze, a);

    std::string fp_a, fp_b, fp_out = "flow_out", fp_pre = "auto";
    CLI::App* flowpair = app.add_subcommand("flow-pair", "flow between two images, dumped as CSV");
    flowpair->add_option("first", fp_a, "first image (ppm/pgm/png)")->required();
    flowpair->add_option("second", fp_b, "second image")->required();
    flowpair->add_option("--out", fp_out, "output directory")->capture_default_str();
    flowpair->add_option("--pre", fp_pre, "preprocessing: auto|chroma-diff|luma")
        ->check(CLI::IsMember({"auto", "chroma-diff", "luma"}))
        ->capture_default_str();
    add_flow_flags(flowpair, a);

    SynthArgs s;
    CLI::App* synth = app.add_subcommand("synth", "render a synthetic scene with ground truth");
    synth->add_option("--kind", s.kind, "translate|rotate|blob|bubbles")
        ->check(CLI::IsMember({"translate", "rotate", "blob", "bubbles"}))
        ->capture_default_str();
    synth->add_option("--width", s.width)->capture_default_str();
    synth->add_option("--height", s.height)->capture_default_str();
    synth->add_option("--frames", s.frames)->capture_default_str();
    synth->add_option("--shift-x", s.shift_x, "px/frame")->capture_default_str();
    synth->add_option("--shift-y", s.shift_y, "px/frame")->capture_default_str();
    synth->add_option("--omega", s.omega, "rad/frame")->capture_default_str();
    synth->add_option("--blob-sigma", s.blob_sigma)->capture_default_str();
    synth->add_option("--noise", s.noise, "achromatic noise sigma")->capture_default_str();
    synth->add_option("--seed", s.seed)->capture_default_str();
    synth->add_option("--waypoints", s.waypoints, "blob path 'x0,y0;x1,y1;...'");
    synth->add_option("--out", s.out, "output directory")->capture_default_str();

    CLI::App* version = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (version->parsed()) {
            std::cout << "aquaflow " << kVersion << "\n";
            return 0;
        }
        if (analyze->parsed()) return run_analyze(a);
        if (flowpair->parsed()) return run_flow_pair(fp_a, fp_b, fp_out, fp_pre, a);
        if (synth->parsed()) return run_synth(s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
