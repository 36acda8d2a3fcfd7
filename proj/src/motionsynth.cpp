#include "cinemaloop/motionsynth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cinemaloop {

namespace {

struct SegmentSample {
  Point2 a;
  Point2 b;
  double vx;
  double vy;
};

double segment_distance2(const SegmentSample& s, double px, double py) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  const double ux = px - s.a.x, uy = py - s.a.y;
  const double t = std::clamp((ux * dx + uy * dy) / len2, 0.0, 1.0);
  const double ex = ux - t * dx, ey = uy - t * dy;
  return ex * ex + ey * ey;
}

}  // namespace

MotionField synthesize_field(const MotionSketchSet& sketches, const FluidMask& mask, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("synthesize_field: sigma must be positive");
  if (sketches.strokes.empty()) throw ArgumentError("synthesize_field: no motion strokes");
  if (sketches.canvas != mask.extent())
    throw ArgumentError("synthesize_field: sketch canvas " + to_string(sketches.canvas) + " does not match mask " +
                        to_string(mask.extent()));

  std::vector<SegmentSample> segments;
  for (const auto& stroke : sketches.strokes) {
    for (std::size_t i = 1; i < stroke.points.size(); ++i) {
      const Point2 a = stroke.points[i - 1];
      const Point2 b = stroke.points[i];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (!(len > 1e-9)) continue;
      segments.push_back({a, b, (b.x - a.x) / len * stroke.speed_scale, (b.y - a.y) / len * stroke.speed_scale});
    }
  }
  if (segments.empty()) throw ArgumentError("synthesize_field: strokes have no non-degenerate segments");

  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  MotionField field(mask.width(), mask.height());
  std::vector<double> d2(segments.size());

  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;

      std::size_t nearest = 0;
      for (std::size_t k = 0; k < segments.size(); ++k) {
        d2[k] = segment_distance2(segments[k], x, y);
        if (d2[k] < d2[nearest]) nearest = k;
      }

      // Weights are shifted by the nearest distance so they never underflow;
      // the unshifted total decides the fallback.
      double total = 0.0, sum_x = 0.0, sum_y = 0.0;
      for (std::size_t k = 0; k < segments.size(); ++k) {
        const double w = std::exp(-(d2[k] - d2[nearest]) * inv_two_sigma2);
        total += w;
        sum_x += w * segments[k].vx;
        sum_y += w * segments[k].vy;
      }
      const double unshifted = total * std::exp(-d2[nearest] * inv_two_sigma2);

      if (unshifted < 1e-12)
        field.at(x, y) = {static_cast<float>(segments[nearest].vx), static_cast<float>(segments[nearest].vy)};
      else
        field.at(x, y) = {static_cast<float>(sum_x / total), static_cast<float>(sum_y / total)};
    }
  }
  return field;
}

}  // namespace cinemaloop
