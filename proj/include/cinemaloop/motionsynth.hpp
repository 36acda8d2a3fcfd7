#pragma once

#include "cinemaloop/field.hpp"
#include "cinemaloop/streamline.hpp"

namespace cinemaloop {

inline constexpr double kDefaultSketchSigma = 25.0;

/// Dense velocity field from motion strokes. Each stroke segment carries
/// unit(direction) * speed_scale; a masked pixel receives the Gaussian
/// (point-to-segment distance, width sigma) weighted mean of all segment
/// velocities, or the nearest segment's velocity where the total weight
/// underflows 1e-12. Unmasked pixels are exactly zero.
///
/// Strokes are used as given; run prepare_motion_stroke first. The sketch
/// canvas must match the mask.
MotionField synthesize_field(const MotionSketchSet& sketches, const FluidMask& mask, double sigma = kDefaultSketchSigma);

}  // namespace cinemaloop
