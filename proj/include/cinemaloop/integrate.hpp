#pragma once

#include <vector>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

/// Forward and backward Euler displacement fields for one loop of length N.
///
/// forward[n] maps frame-0 pixels to their frame-n positions (n = 0..N).
/// backward[n] holds the displacement for frame n - N, obtained by stepping
/// N - n times through the negated field; backward[N] is therefore zero.
struct DisplacementSequence {
  int loop_length = 0;
  std::vector<DisplacementField> forward;
  std::vector<DisplacementField> backward;

  Extent extent() const { return forward.empty() ? Extent{} : forward.front().extent(); }
};

/// One particle step: p + F(p), with F sampled bilinearly.
Point2 advect_point(const MotionField& field, Point2 p);

/// Copy of `field` with every vector outside the mask set to zero.
MotionField masked_field(const MotionField& field, const FluidMask& mask);

/// Euler integration F_{0->n} = F_{0->n-1} + F(p + F_{0->n-1}) in both time
/// directions; results are stored as float32. The field is zeroed outside the mask first, and
/// pixels outside the mask never move.
DisplacementSequence integrate_displacements(const MotionField& field, int loop_length, const FluidMask& mask);

}  // namespace cinemaloop
