#pragma once

// Streamline tracing, stroke normalization and gradient-greyscale sketch
// rasterization.

#include <span>
#include <vector>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

/// Points per normalized stroke.
inline constexpr int kStrokePoints = 20;
/// Tracing stops once the local speed drops below this (pixels/frame).
inline constexpr double kStagnationSpeed = 1e-4;
/// Rasterized intensity at the first and last point of a stroke.
inline constexpr int kStrokeStartIntensity = 255;
inline constexpr int kStrokeEndIntensity = 64;

using Polyline = std::vector<Point2>;

/// A direction-bearing polyline; the flow runs from the first to the last point.
struct MotionStroke {
  Polyline points;
  /// Speed in pixels/frame assigned along the stroke direction.
  double speed_scale = 1.0;
};

struct MotionSketchSet {
  Extent canvas;
  std::vector<MotionStroke> strokes;
};

/// One classic fourth-order Runge-Kutta step of size h through `velocity`,
/// any callable mapping Point2 to a type with `x` and `y` members.
template <class VelocityFn>
Point2 rk4_step(VelocityFn&& velocity, Point2 p, double h) {
  const auto k1 = velocity(p);
  const auto k2 = velocity(Point2{p.x + 0.5 * h * k1.x, p.y + 0.5 * h * k1.y});
  const auto k3 = velocity(Point2{p.x + 0.5 * h * k2.x, p.y + 0.5 * h * k2.y});
  const auto k4 = velocity(Point2{p.x + h * k3.x, p.y + h * k3.y});
  return {p.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          p.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

/// Follows the flow from `seed` with RK4 over the bilinearly sampled field.
/// Stops after `max_steps` steps, when the next point would leave the image
/// or the mask (nearest pixel), or when the local speed falls below
/// kStagnationSpeed. The returned polyline starts at the seed and may
/// consist of that single point.
Polyline trace_streamline(const MotionField& field, Point2 seed, double step, int max_steps, const FluidMask& mask);

struct StreamlineParams {
  int seed_spacing = 32;
  double step = 0.5;
  int max_steps = 200;
  /// Mean speed sampled at the visited points, pixels/frame.
  double min_mean_speed = 0.3;
  /// Minimum polyline arc length, pixels.
  double min_length = 24.0;
};

/// Seeds a regular grid inside the mask, traces each seed, keeps lines
/// passing both filters and normalizes them with prepare_motion_stroke.
MotionSketchSet extract_streamlines(const MotionField& field, const FluidMask& mask, const StreamlineParams& params = {});

/// Seed positions used by extract_streamlines, row-major.
std::vector<Point2> streamline_seeds(const FluidMask& mask, int seed_spacing);

/// Normalizes a raw stroke to kStrokePoints points: uniform arc-length
/// resampling, one 3-tap moving-average pass over interior points, then
/// re-spacing so consecutive points are equidistant. Endpoints and
/// orientation are kept. A stroke that is already normalized comes back
/// unchanged.
MotionStroke prepare_motion_stroke(const MotionStroke& raw);

/// True for kStrokePoints equidistant points (relative tolerance 1e-6).
bool is_prepared(const MotionStroke& stroke);

double arc_length(std::span<const Point2> points);

/// Black background; each stroke drawn with round caps, intensity ramping
/// linearly with arc length from kStrokeStartIntensity to kStrokeEndIntensity.
/// Overlapping strokes combine by maximum.
ImageU8 rasterize_sketches(const MotionSketchSet& sketches, double thickness = 3.0);

}  // namespace cinemaloop
