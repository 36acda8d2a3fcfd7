#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

using Rgb8 = std::array<std::uint8_t, 3>;

/// The 55-entry Middlebury color wheel (RY=15, YG=6, GC=4, CB=11, BM=13, MR=6), RGB order.
const std::vector<Rgb8>& color_wheel();

/// Color of a single flow vector whose magnitude is already divided by the
/// normalization radius. Saturation is clipped at radius 1.
Rgb8 flow_color(double u, double v);

/// Color-wheel rendering of a flow field as a 3-channel RGB image. Without a
/// radius, the maximum magnitude in the field is used (floored at 1e-6).
ImageU8 visualize_flow(const MotionField& field, std::optional<double> max_radius = std::nullopt);

}  // namespace cinemaloop
