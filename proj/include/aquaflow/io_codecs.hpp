#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aquaflow/field.hpp"

namespace aquaflow {

/// Where frames come from. Image sequences are directories of PPM/PGM/PNG
/// files sorted by filename (zero-padded numeric suffixes sort correctly);
/// yuv4mpeg sources are .y4m files or "-" for a stream on stdin.
struct FrameSource {
    enum class Kind { image_sequence, yuv4mpeg };
    Kind kind = Kind::image_sequence;
    std::filesystem::path path;
    /// Frames per second. 0 means "take it from the stream header" (y4m);
    /// image sequences need it only for windows given in seconds.
    double fps = 0.0;
    /// Optional [start, end) trim applied before any windowing.
    std::optional<std::pair<std::int64_t, std::int64_t>> frame_index_range;
};

/// A decoded frame: RGB for color images, YUV for y4m streams (already in YUV,
/// so the color transform is skipped), or a bare luma field for grayscale
/// images and mono streams.
struct DecodedFrame {
    std::int64_t index = 0;
    std::variant<RgbFrame, YuvFrame, ScalarField> image;
};

class FrameReader {
public:
    static std::unique_ptr<FrameReader> open(const FrameSource& source);
    virtual ~FrameReader() = default;

    /// Next frame in index order, or nullopt at end of stream.
    virtual std::optional<DecodedFrame> next() = 0;
    /// Position the reader at the given frame index. Pipe-backed streams only
    /// seek forward (by skipping frames without decoding their planes).
    virtual void seek(std::int64_t index) = 0;
    virtual bool seekable() const = 0;
    /// Total frame count, or -1 when unknown (streams). Seeking past the end
    /// and reading position() gives the count for seekable streams.
    virtual std::int64_t frame_count() const = 0;
    /// Index of the frame the next call to next() would return.
    virtual std::int64_t position() const = 0;
    /// Declared or parsed frames per second (0 when unknown).
    virtual double fps() const = 0;
};

// --- single images ---

std::variant<RgbFrame, ScalarField> read_image(const std::filesystem::path& path);
void write_ppm(const RgbFrame& frame, const std::filesystem::path& path);
void write_pgm(const ScalarField& field, const std::filesystem::path& path); // clamps to [0,255]

// --- matrices ---

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// 8-bit PGM with values linearly mapped from [0, max] to [0, 255]
/// (max-normalized; an all-zero matrix writes all-zero bytes).
void write_heatmap_pgm(const Matrix& m, const std::filesystem::path& path);

// --- session report ---

struct WindowResult {
    std::string name;
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    std::int64_t frames_retained = 0;
    std::int64_t pairs_processed = 0;
    std::int64_t gated_pixels = 0; // gated-positive pixel events
    double gated_mass = 0.0;       // sum of gated magnitudes
    double dispersion_total = 0.0;
    double motion_count = 0.0;
    Matrix dispersion_prob;
    Matrix motion_prob;
};

struct SessionReport {
    int schema_version = 1;
    std::map<std::string, std::string> config_echo;
    double tol_used = 0.0;
    std::vector<WindowResult> windows;
    /// Wall-clock seconds; written to a timing sidecar, never to report.json,
    /// so report bytes stay reproducible.
    double elapsed_seconds = 0.0;
};

void write_report_json(const SessionReport& report, const std::filesystem::path& path);

} // namespace aquaflow
