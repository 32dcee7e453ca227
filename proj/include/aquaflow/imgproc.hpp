#pragma once

#include "aquaflow/field.hpp"

namespace aquaflow {

/// Full-range BT.601 RGB -> YUV. Output planes are real-valued and unclamped;
/// U and V carry the +128 offset. Achromatic pixels (r == g == b) produce
/// u == v exactly, which is what makes chroma differencing cancel the
/// background, so the conversion is arranged so that this holds bit-exactly.
YuvFrame rgb_to_yuv(const RgbFrame& frame);

/// Per-pixel |u - v|. The +128 offsets cancel; achromatic pixels map to 0.
/// Output is tagged FieldKind::chroma_difference.
ScalarField chroma_difference(const YuvFrame& frame);

/// The Y plane as a standalone field (tagged luma).
ScalarField luma_field(const YuvFrame& frame);

/// Fused rgb_to_yuv + chroma_difference / luma extraction; same values as the
/// two-step path without materializing the YUV planes.
ScalarField chroma_difference(const RgbFrame& frame);
ScalarField luma_field(const RgbFrame& frame);

} // namespace aquaflow
