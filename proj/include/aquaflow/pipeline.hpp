#pragma once

#include "aquaflow/analytics.hpp"
#include "aquaflow/flow.hpp"
#include "aquaflow/io_codecs.hpp"
#include "aquaflow/polyexp.hpp"

namespace aquaflow {

/// Analysis window over frame indices, [start, end). end == -1 means "to the
/// end of the stream". Windows are processed independently; frame pairs never
/// straddle a window boundary, so adjacent windows may share one boundary
/// frame when seamless coverage of every pair is wanted.
struct WindowSpec {
    std::int64_t start = 0;
    std::int64_t end = -1;
};

struct SessionConfig {
    FrameSource source;
    ExpansionParams expansion;
    FlowParams flow;
    Tolerance tol;
    /// Estimate the tolerance from the first pairs of the run instead of
    /// using tol: median + 3*MAD of all observed magnitudes. Needs a seekable
    /// source (the pre-pass rewinds).
    bool tol_auto = false;
    int tol_auto_pairs = 10;

    int grid_rows = 36;
    int grid_cols = 30;
    int mag_bins = 60;
    int angle_bins = 64;
    double mag_max = 10.0;

    std::vector<WindowSpec> windows; // empty: one window over the whole stream
    std::int64_t frame_stride = 1;   // subsample before pairing

    enum class Preprocess { chroma_diff, luma };
    Preprocess preprocess = Preprocess::chroma_diff;

    /// Output directory for per-window artifacts and report.json; empty runs
    /// in-memory only.
    std::filesystem::path out_dir;
    int threads = 0; // 0: hardware concurrency
};

/// Runs the full pipeline: stream frames per window (strided), preprocess,
/// estimate displacement on consecutive retained pairs, gate magnitudes and
/// accumulate the dispersion grid and motion histogram. Writes per-window
/// CSV/PGM artifacts plus report.json when out_dir is set.
SessionReport run_session(const SessionConfig& config);

} // namespace aquaflow
