#pragma once

#include <cstdint>

#include "aquaflow/field.hpp"

namespace aquaflow {

/// Magnitude gate below which motion is treated as noise.
struct Tolerance {
    double tol = 0.2; // px per frame pair
};

/// Element-wise gating: value if value >= tol, else 0. Input must be tagged
/// magnitude; output keeps the tag.
ScalarField apply_tolerance(const ScalarField& mag, Tolerance tol);

/// Spatial accumulator of gated motion magnitude on a coarse grid. Each pixel's
/// gated magnitude is added to the cell containing its proportionally scaled
/// position. Construction fixes the grid and the frame dimensions it maps from.
class DispersionGrid {
public:
    DispersionGrid(int rows, int cols, int frame_width, int frame_height);

    void accumulate(const ScalarField& gated_mag);
    void merge(const DispersionGrid& other);

    /// Cell sums divided by their total; all zeros if nothing accumulated.
    Matrix probabilities() const;
    const Matrix& sums() const { return sums_; }
    double total() const;
    std::int64_t frames_accumulated() const { return frames_; }
    int rows() const { return sums_.rows; }
    int cols() const { return sums_.cols; }
    int frame_width() const { return frame_width_; }
    int frame_height() const { return frame_height_; }

private:
    int frame_width_, frame_height_;
    Matrix sums_;
    std::int64_t frames_ = 0;
};

/// Joint histogram over (magnitude, folded turning angle). Magnitudes bin
/// linearly on [0, mag_max] with overflow clamped into the top bin; angles are
/// folded to |angle| in [0, pi]. Each gated-positive pixel counts 1.
class MotionHistogram {
public:
    MotionHistogram(int mag_bins, int angle_bins, double mag_max);

    void accumulate(const ScalarField& gated_mag, const ScalarField& angle);
    void merge(const MotionHistogram& other);

    Matrix probabilities() const;
    const Matrix& counts() const { return counts_; }
    double total() const;
    std::int64_t frames_accumulated() const { return frames_; }
    int mag_bins() const { return counts_.rows; }
    int angle_bins() const { return counts_.cols; }
    double mag_max() const { return mag_max_; }

private:
    double mag_max_;
    Matrix counts_;
    std::int64_t frames_ = 0;
};

inline DispersionGrid merge(DispersionGrid a, const DispersionGrid& b) {
    a.merge(b);
    return a;
}

inline MotionHistogram merge(MotionHistogram a, const MotionHistogram& b) {
    a.merge(b);
    return a;
}

} // namespace aquaflow
