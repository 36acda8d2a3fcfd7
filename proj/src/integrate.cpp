#include "cinemaloop/integrate.hpp"

#include <cmath>

#include "cinemaloop/sampling.hpp"

namespace cinemaloop {

namespace {

/// Displacements after 0..steps Euler steps through `field`. The running
/// displacement is carried in double precision and stored as float32 per
/// step; float32 feedback would amplify rounding through the field gradient.
std::vector<DisplacementField> euler_steps(const MotionField& field, const FluidMask& mask, int steps, int sign) {
  const int w = field.width();
  const int h = field.height();
  std::vector<DisplacementField> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.emplace_back(w, h, 0);

  std::vector<Point2> state(field.extent().pixels());
  for (int n = 1; n <= steps; ++n) {
    DisplacementField cur(w, h, sign * n);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!mask.at(x, y)) continue;
        Point2& d = state[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
        const Point2 v = sample_bilinear_precise(field, Point2{x + d.x, y + d.y});
        d = {d.x + v.x, d.y + v.y};
        cur.at(x, y) = Vec2f{static_cast<float>(d.x), static_cast<float>(d.y)};
      }
    }
    out.push_back(std::move(cur));
  }
  return out;
}

}  // namespace

Point2 advect_point(const MotionField& field, Point2 p) {
  const Point2 v = sample_bilinear_precise(field, p);
  return {p.x + v.x, p.y + v.y};
}

MotionField masked_field(const MotionField& field, const FluidMask& mask) {
  if (field.extent() != mask.extent())
    throw ArgumentError("mask " + to_string(mask.extent()) + " does not match field " + to_string(field.extent()));
  MotionField out = field;
  for (int y = 0; y < field.height(); ++y)
    for (int x = 0; x < field.width(); ++x)
      if (!mask.at(x, y)) out.at(x, y) = {};
  return out;
}

DisplacementSequence integrate_displacements(const MotionField& field, int loop_length, const FluidMask& mask) {
  if (loop_length < 1) throw ArgumentError("integrate_displacements: loop length must be >= 1");
  const MotionField fluid = masked_field(field, mask);

  MotionField reversed = fluid;
  for (auto& v : reversed.data()) v = {-v.x, -v.y};

  DisplacementSequence seq;
  seq.loop_length = loop_length;
  seq.forward = euler_steps(fluid, mask, loop_length, +1);

  // backward[n] = F_{0->n-N}: N-n steps through the reversed field.
  auto reverse_steps = euler_steps(reversed, mask, loop_length, -1);
  seq.backward.reserve(reverse_steps.size());
  for (int n = 0; n <= loop_length; ++n) seq.backward.push_back(std::move(reverse_steps[loop_length - n]));
  return seq;
}

}  // namespace cinemaloop
