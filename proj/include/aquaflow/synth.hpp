#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aquaflow/field.hpp"

namespace aquaflow {

/// Synthetic scene description. Rendering is deterministic given the seed.
struct SceneSpec {
    enum class Kind {
        global_translate,      // band-limited texture under constant shift
        rigid_rotate,          // same texture rotating about the image center
        moving_gaussian_blob,  // achromatic intensity blob on a flat background
        bubbles_over_blob      // chromatic blob plus achromatic rising disks
    };
    Kind kind = Kind::global_translate;
    int width = 256;
    int height = 256;
    int frame_count = 2;
    double shift_x = 0.5, shift_y = 0.0; // px/frame for global_translate
    double angular_velocity = 0.02;      // rad/frame for rigid_rotate
    double blob_sigma = 10.0;
    /// Blob trajectory, traversed linearly across the clip. Empty means a
    /// horizontal sweep through the lower half of the frame.
    std::vector<std::pair<double, double>> waypoints;
    double noise_sigma = 0.0; // achromatic per-pixel Gaussian noise
    std::uint64_t seed = 1;
};

struct RenderedScene {
    std::vector<RgbFrame> frames;
    /// Exact displacement between consecutive frames; truth[t] maps frame t to
    /// frame t+1. For blob scenes the motion is reported inside the blob's
    /// support and zero elsewhere.
    std::vector<FlowField> truth;
    /// bubbles_over_blob only: per-frame pixel masks (empty otherwise).
    std::vector<std::vector<std::uint8_t>> blob_mask;
    std::vector<std::vector<std::uint8_t>> bubble_mask; // bubble pixels clear of the blob
};

RenderedScene render(const SceneSpec& spec);

/// Blob center at a given frame index (blob scenes).
std::pair<double, double> blob_center(const SceneSpec& spec, int frame);

struct EndpointError {
    double mean = 0, median = 0, p95 = 0;
};

/// Euclidean error statistics between an estimated and a true flow field over
/// valid pixels at least `interior_margin` away from every border.
EndpointError endpoint_error(const FlowField& flow, const FlowField& truth, int interior_margin);

} // namespace aquaflow
