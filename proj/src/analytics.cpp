#include "aquaflow/analytics.hpp"

#include <cmath>

namespace aquaflow {
namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix normalized(const Matrix& m) {
    double total = 0.0;
    for (double v : m.v) total += v;
    Matrix out(m.rows, m.cols);
    if (total > 0)
        for (std::size_t i = 0; i < m.v.size(); ++i) out.v[i] = m.v[i] / total;
    return out;
}

} // namespace

ScalarField apply_tolerance(const ScalarField& mag, Tolerance tol) {
    if (mag.kind != FieldKind::magnitude)
        throw Error("apply_tolerance: input field is not tagged magnitude");
    if (!(tol.tol >= 0) || !std::isfinite(tol.tol))
        throw Error("apply_tolerance: tolerance must be finite and >= 0");
    ScalarField out(mag.width, mag.height, FieldKind::magnitude);
    for (std::size_t i = 0; i < mag.data.size(); ++i)
        out.data[i] = mag.data[i] >= tol.tol ? mag.data[i] : 0.0;
    return out;
}

DispersionGrid::DispersionGrid(int rows, int cols, int frame_width, int frame_height)
    : frame_width_(frame_width), frame_height_(frame_height), sums_(rows, cols) {
    if (rows < 1 || cols < 1) throw Error("DispersionGrid: grid dimensions must be >= 1");
    if (frame_width < 1 || frame_height < 1)
        throw Error("DispersionGrid: frame dimensions must be >= 1");
}

void DispersionGrid::accumulate(const ScalarField& gated_mag) {
    if (gated_mag.width != frame_width_ || gated_mag.height != frame_height_)
        throw DimensionMismatch("DispersionGrid: frame " + std::to_string(gated_mag.width) + "x" +
                                std::to_string(gated_mag.height) + " does not match configured " +
                                std::to_string(frame_width_) + "x" + std::to_string(frame_height_));
    const int rows = sums_.rows;
    const int cols = sums_.cols;
    // bin into a per-frame scratch first: repeated accumulation of identical
    // frames then doubles the sums exactly
    Matrix frame_sums(rows, cols);
    for (int y = 0; y < frame_height_; ++y) {
        int cr = static_cast<int>(static_cast<std::int64_t>(y) * rows / frame_height_);
        if (cr > rows - 1) cr = rows - 1;
        const double* row = gated_mag.row(y);
        for (int x = 0; x < frame_width_; ++x) {
            const double v = row[x];
            if (v == 0.0) continue;
            int cc = static_cast<int>(static_cast<std::int64_t>(x) * cols / frame_width_);
            if (cc > cols - 1) cc = cols - 1;
            frame_sums.at(cr, cc) += v;
        }
    }
    for (std::size_t i = 0; i < sums_.v.size(); ++i) sums_.v[i] += frame_sums.v[i];
    ++frames_;
}

void DispersionGrid::merge(const DispersionGrid& other) {
    if (other.sums_.rows != sums_.rows || other.sums_.cols != sums_.cols ||
        other.frame_width_ != frame_width_ || other.frame_height_ != frame_height_)
        throw ConfigMismatch("DispersionGrid::merge: accumulator configurations differ");
    for (std::size_t i = 0; i < sums_.v.size(); ++i) sums_.v[i] += other.sums_.v[i];
    frames_ += other.frames_;
}

Matrix DispersionGrid::probabilities() const { return normalized(sums_); }

double DispersionGrid::total() const {
    double t = 0.0;
    for (double v : sums_.v) t += v;
    return t;
}

MotionHistogram::MotionHistogram(int mag_bins, int angle_bins, double mag_max)
    : mag_max_(mag_max), counts_(mag_bins, angle_bins) {
    if (mag_bins < 1 || angle_bins < 1) throw Error("MotionHistogram: bin counts must be >= 1");
    if (!(mag_max > 0)) throw Error("MotionHistogram: mag_max must be > 0");
}

void MotionHistogram::accumulate(const ScalarField& gated_mag, const ScalarField& angle) {
    require_same_dims(gated_mag.width, gated_mag.height, angle.width, angle.height,
                      "MotionHistogram fields");
    const int mb = counts_.rows;
    const int ab = counts_.cols;
    for (std::size_t i = 0; i < gated_mag.data.size(); ++i) {
        const double m = gated_mag.data[i];
        if (m <= 0.0) continue;
        int mi = static_cast<int>(std::floor(m / mag_max_ * mb));
        if (mi > mb - 1) mi = mb - 1; // overflow clamps into the top bin
        // fold: +theta and -theta land in the same bin
        const double folded = std::abs(angle.data[i]);
        int ai = static_cast<int>(std::floor(folded / kPi * ab));
        if (ai > ab - 1) ai = ab - 1;
        counts_.at(mi, ai) += 1.0;
    }
    ++frames_;
}

void MotionHistogram::merge(const MotionHistogram& other) {
    if (other.counts_.rows != counts_.rows || other.counts_.cols != counts_.cols ||
        other.mag_max_ != mag_max_)
        throw ConfigMismatch("MotionHistogram::merge: accumulator configurations differ");
    for (std::size_t i = 0; i < counts_.v.size(); ++i) counts_.v[i] += other.counts_.v[i];
    frames_ += other.frames_;
}

Matrix MotionHistogram::probabilities() const { return normalized(counts_); }

double MotionHistogram::total() const {
    double t = 0.0;
    for (double v : counts_.v) t += v;
    return t;
}

} // namespace aquaflow
