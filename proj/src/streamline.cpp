#include "cinemaloop/streamline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cinemaloop/sampling.hpp"

namespace cinemaloop {

namespace {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

Polyline drop_repeats(const Polyline& points) {
  Polyline out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ArgumentError("motion stroke: non-finite point");
    if (out.empty() || distance(out.back(), p) > 1e-9) out.push_back(p);
  }
  return out;
}

Polyline resample_arc_length(const Polyline& points, int count) {
  std::vector<double> cumulative(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) cumulative[i] = cumulative[i - 1] + distance(points[i - 1], points[i]);
  const double total = cumulative.back();

  Polyline out;
  out.reserve(static_cast<std::size_t>(count));
  out.push_back(points.front());
  std::size_t seg = 0;
  for (int i = 1; i < count - 1; ++i) {
    const double target = total * i / (count - 1);
    while (seg + 2 < points.size() && cumulative[seg + 1] < target) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double t = len > 0.0 ? std::clamp((target - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(lerp(points[seg], points[seg + 1], t));
  }
  out.push_back(points.back());
  return out;
}

Polyline smooth_interior(const Polyline& points) {
  Polyline out = points;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    out[i] = {(points[i - 1].x + points[i].x + points[i + 1].x) / 3.0,
              (points[i - 1].y + points[i].y + points[i + 1].y) / 3.0};
  }
  return out;
}

/// Places points along `poly` so each lies exactly `gap` (Euclidean) from
/// its predecessor, always taking the first crossing further along the line.
struct ChordWalk {
  Polyline points;
  double position = 0.0;  // segment index + fraction of the last placed point
  bool exhausted = false;
};

ChordWalk walk_chords(const Polyline& poly, double gap, int count) {
  ChordWalk walk;
  walk.points.push_back(poly.front());
  std::size_t seg = 0;
  double t = 0.0;
  const std::size_t segments = poly.size() - 1;

  for (int k = 1; k < count; ++k) {
    const Point2 centre = walk.points.back();
    bool found = false;
    for (std::size_t j = seg; j < segments && !found; ++j) {
      const double t0 = (j == seg) ? t : 0.0;
      const Point2 a = lerp(poly[j], poly[j + 1], t0);
      const Point2 b = poly[j + 1];
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double fx = a.x - centre.x, fy = a.y - centre.y;
      const double qa = dx * dx + dy * dy;
      if (qa == 0.0) continue;
      const double qb = 2.0 * (fx * dx + fy * dy);
      const double qc = fx * fx + fy * fy - gap * gap;
      const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
      const double u = (-qb + std::sqrt(disc)) / (2.0 * qa);
      if (u < 0.0 || u > 1.0) continue;
      seg = j;
      t = t0 + u * (1.0 - t0);
      walk.points.push_back(lerp(poly[j], poly[j + 1], t));
      found = true;
    }
    if (!found) {
      walk.exhausted = true;
      return walk;
    }
  }
  walk.position = static_cast<double>(seg) + t;
  return walk;
}

double chord_spread(const Polyline& pts) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = distance(pts[i - 1], pts[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
}

/// Bisection on the chord length of the walk until the last point lands on
/// the polyline's end.
Polyline equalize_by_walk(const Polyline& poly, int count) {
  const double end = static_cast<double>(poly.size() - 1);
  double lo = 0.0;
  double hi = arc_length(poly);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const ChordWalk w = walk_chords(poly, mid, count);
    if (!w.exhausted && w.position < end)
      lo = mid;
    else
      hi = mid;
  }
  ChordWalk w = walk_chords(poly, lo, count);
  if (w.exhausted) return resample_arc_length(poly, count);
  w.points.back() = poly.back();
  return w.points;
}

/// Arc-length parametrization of a polyline.
class ArcParam {
 public:
  explicit ArcParam(const Polyline& poly) : poly_(poly), cumulative_(poly.size(), 0.0) {
    for (std::size_t i = 1; i < poly.size(); ++i) cumulative_[i] = cumulative_[i - 1] + distance(poly[i - 1], poly[i]);
  }

  double total() const { return cumulative_.back(); }

  Point2 point(double s) const {
    const std::size_t seg = segment(s);
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    const double t = len > 0.0 ? std::clamp((s - cumulative_[seg]) / len, 0.0, 1.0) : 0.0;
    return lerp(poly_[seg], poly_[seg + 1], t);
  }

  /// Unit tangent of the segment containing s.
  Point2 tangent(double s) const {
    const std::size_t seg = segment(s);
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    if (!(len > 0.0)) return {0.0, 0.0};
    return {(poly_[seg + 1].x - poly_[seg].x) / len, (poly_[seg + 1].y - poly_[seg].y) / len};
  }

 private:
  std::size_t segment(double s) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t seg = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    return std::min(seg, poly_.size() - 2);
  }

  const Polyline& poly_;
  std::vector<double> cumulative_;
};

/// Damped Newton on the arc-length positions of the interior points, solving
/// chord[i] == chord[i + 1] for every interior point. The Jacobian is
/// tridiagonal.
Polyline equalize_by_newton(const Polyline& poly, int count) {
  const ArcParam arc(poly);
  const double total = arc.total();
  const std::size_t n = static_cast<std::size_t>(count);

  std::vector<double> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = total * static_cast<double>(i) / (count - 1);

  auto points_at = [&](const std::vector<double>& s) {
    Polyline pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = arc.point(s[i]);
    pts.front() = poly.front();
    pts.back() = poly.back();
    return pts;
  };
  // residual[i - 1] = chord(i-1, i) - chord(i, i+1), i = 1..n-2
  auto residual = [&](const Polyline& pts) {
    std::vector<double> r(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) r[i - 1] = distance(pts[i - 1], pts[i]) - distance(pts[i], pts[i + 1]);
    return r;
  };
  auto norm2 = [](const std::vector<double>& r) {
    double sum = 0.0;
    for (double v : r) sum += v * v;
    return sum;
  };

  // Fixed-point warm start: shift each position by the gap between its
  // target and its running chord sum.
  for (int iter = 0; iter < 400; ++iter) {
    const Polyline cur = points_at(pos);
    std::vector<double> running(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) running[i] = running[i - 1] + distance(cur[i - 1], cur[i]);
    const double target = running.back() / (count - 1);
    for (std::size_t i = 1; i + 1 < n; ++i)
      pos[i] = std::clamp(pos[i] + (target * static_cast<double>(i) - running[i]), 0.0, total);
  }

  Polyline pts = points_at(pos);
  std::vector<double> r = residual(pts);
  for (int iter = 0; iter < 100 && chord_spread(pts) > 1e-13; ++iter) {
    // chord directions u[i] from point i-1 to point i, tangents at each point
    std::vector<Point2> u(n), t(n);
    for (std::size_t i = 1; i < n; ++i) {
      const double c = distance(pts[i - 1], pts[i]);
      u[i] = c > 0.0 ? Point2{(pts[i].x - pts[i - 1].x) / c, (pts[i].y - pts[i - 1].y) / c} : Point2{};
    }
    for (std::size_t i = 0; i < n; ++i) t[i] = arc.tangent(pos[i]);
    auto dot = [](Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; };

    const std::size_t m = n - 2;
    std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      if (k > 0) lower[k] = -dot(t[i - 1], u[i]);
      diag[k] = dot(t[i], u[i]) + dot(t[i], u[i + 1]);
      if (k + 1 < m) upper[k] = -dot(t[i + 1], u[i + 1]);
      rhs[k] = -r[k];
    }
    // Thomas algorithm
    for (std::size_t k = 1; k < m; ++k) {
      if (std::fabs(diag[k - 1]) < 1e-12) return pts;
      const double f = lower[k] / diag[k - 1];
      diag[k] -= f * upper[k - 1];
      rhs[k] -= f * rhs[k - 1];
    }
    std::vector<double> step(m);
    for (std::size_t k = m; k-- > 0;) {
      if (std::fabs(diag[k]) < 1e-12) return pts;
      step[k] = (rhs[k] - (k + 1 < m ? upper[k] * step[k + 1] : 0.0)) / diag[k];
    }

    const double current = norm2(r);
    bool improved = false;
    for (double damping = 1.0; damping > 1e-4; damping *= 0.5) {
      std::vector<double> trial = pos;
      for (std::size_t k = 0; k < m; ++k) trial[k + 1] = std::clamp(pos[k + 1] + damping * step[k], 0.0, total);
      const Polyline trial_pts = points_at(trial);
      const std::vector<double> trial_r = residual(trial_pts);
      if (norm2(trial_r) < current) {
        pos = std::move(trial);
        pts = trial_pts;
        r = trial_r;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return pts;
}

Polyline equalize_chords(const Polyline& poly, int count) {
  Polyline best = equalize_by_newton(poly, count);
  if (chord_spread(best) < 1e-9) return best;
  Polyline walked = equalize_by_walk(poly, count);
  return chord_spread(walked) < chord_spread(best) ? walked : best;
}

}  // namespace

double arc_length(std::span<const Point2> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

Polyline trace_streamline(const MotionField& field, Point2 seed, double step, int max_steps, const FluidMask& mask) {
  if (field.extent() != mask.extent()) throw ArgumentError("trace_streamline: mask does not match field");
  if (!(step > 0.0) || !std::isfinite(step)) throw ArgumentError("trace_streamline: step must be positive");
  if (max_steps < 0) throw ArgumentError("trace_streamline: max_steps must be >= 0");
  if (!std::isfinite(seed.x) || !std::isfinite(seed.y)) throw ArgumentError("trace_streamline: non-finite seed");

  auto inside = [&](Point2 p) {
    const long ix = std::lround(p.x);
    const long iy = std::lround(p.y);
    if (ix < 0 || iy < 0 || ix >= field.width() || iy >= field.height()) return false;
    return mask.at(static_cast<int>(ix), static_cast<int>(iy));
  };
  auto velocity = [&](Point2 p) { return sample_bilinear_precise(field, p); };

  if (!inside(seed)) throw ArgumentError("trace_streamline: seed lies outside the mask");

  Polyline points{seed};
  Point2 p = seed;
  for (int i = 0; i < max_steps; ++i) {
    const Point2 v = velocity(p);
    if (std::hypot(v.x, v.y) < kStagnationSpeed) break;
    const Point2 next = rk4_step(velocity, p, step);
    if (!inside(next)) break;
    points.push_back(next);
    p = next;
  }
  return points;
}

std::vector<Point2> streamline_seeds(const FluidMask& mask, int seed_spacing) {
  if (seed_spacing < 1) throw ArgumentError("seed spacing must be >= 1");
  std::vector<Point2> seeds;
  const int offset = (seed_spacing - 1) / 2;
  for (int y = offset; y < mask.height(); y += seed_spacing)
    for (int x = offset; x < mask.width(); x += seed_spacing)
      if (mask.at(x, y)) seeds.push_back({static_cast<double>(x), static_cast<double>(y)});
  return seeds;
}

MotionSketchSet extract_streamlines(const MotionField& field, const FluidMask& mask, const StreamlineParams& params) {
  if (field.extent() != mask.extent()) throw ArgumentError("extract_streamlines: mask does not match field");

  MotionSketchSet set;
  set.canvas = field.extent();
  for (const Point2 seed : streamline_seeds(mask, params.seed_spacing)) {
    const Polyline line = trace_streamline(field, seed, params.step, params.max_steps, mask);
    if (line.size() < 2) continue;

    double speed_sum = 0.0;
    for (const auto& p : line) {
      const Vec2f v = sample_bilinear(field, p);
      speed_sum += std::hypot(static_cast<double>(v.x), static_cast<double>(v.y));
    }
    const double mean_speed = speed_sum / static_cast<double>(line.size());
    const double length = arc_length(line);
    if (mean_speed < params.min_mean_speed || length < params.min_length || !(length > 0.0)) continue;

    try {
      set.strokes.push_back(prepare_motion_stroke(MotionStroke{line, mean_speed}));
    } catch (const ArgumentError&) {
      // fewer than two distinct points
    }
  }
  return set;
}

bool is_prepared(const MotionStroke& stroke) {
  if (stroke.points.size() != static_cast<std::size_t>(kStrokePoints)) return false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 1; i < stroke.points.size(); ++i) {
    const double gap = distance(stroke.points[i - 1], stroke.points[i]);
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
  }
  return lo > 1e-9 && (hi - lo) <= 1e-6 * hi;
}

MotionStroke prepare_motion_stroke(const MotionStroke& raw) {
  const Polyline distinct = drop_repeats(raw.points);
  if (distinct.size() < 2) throw ArgumentError("motion stroke needs at least 2 distinct points");
  if (is_prepared(raw)) return raw;

  const Polyline smoothed = drop_repeats(smooth_interior(resample_arc_length(distinct, kStrokePoints)));
  return MotionStroke{equalize_chords(smoothed, kStrokePoints), raw.speed_scale};
}

ImageU8 rasterize_sketches(const MotionSketchSet& sketches, double thickness) {
  if (!(thickness >= 1.0) || !std::isfinite(thickness)) throw ArgumentError("rasterize: thickness must be >= 1");
  const Extent canvas = sketches.canvas;
  ImageU8 out(canvas.width, canvas.height, 1);
  const double radius = 0.5 * thickness;
  const double r2 = radius * radius;
  constexpr double kSpan = kStrokeEndIntensity - kStrokeStartIntensity;

  for (const auto& stroke : sketches.strokes) {
    const Polyline& pts = stroke.points;
    if (pts.empty()) continue;
    std::vector<double> cumulative(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) cumulative[i] = cumulative[i - 1] + distance(pts[i - 1], pts[i]);
    const double total = cumulative.back();

    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const auto& p : pts) {
      min_x = std::min(min_x, p.x), max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y), max_y = std::max(max_y, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - radius)));
    const int x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(max_x + radius)));
    const int y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(max_y + radius)));
    if (x0 > x1 || y0 > y1) continue;

    // Closest stroke point per pixel, expressed as arc-length position.
    const int bw = x1 - x0 + 1;
    const int bh = y1 - y0 + 1;
    std::vector<double> best_d2(static_cast<std::size_t>(bw) * bh, std::numeric_limits<double>::infinity());
    std::vector<double> best_s(best_d2.size(), 0.0);

    const std::size_t segments = pts.size() > 1 ? pts.size() - 1 : 1;
    for (std::size_t j = 0; j < segments; ++j) {
      const Point2 a = pts[j];
      const Point2 b = pts.size() > 1 ? pts[j + 1] : pts[j];
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double len2 = dx * dx + dy * dy;
      const int sx0 = std::max(x0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius)));
      const int sx1 = std::min(x1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius)));
      const int sy0 = std::max(y0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius)));
      const int sy1 = std::min(y1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius)));
      for (int y = sy0; y <= sy1; ++y) {
        for (int x = sx0; x <= sx1; ++x) {
          const double px = x - a.x, py = y - a.y;
          const double u = len2 > 0.0 ? std::clamp((px * dx + py * dy) / len2, 0.0, 1.0) : 0.0;
          const double ex = px - u * dx, ey = py - u * dy;
          const double d2 = ex * ex + ey * ey;
          const std::size_t idx = static_cast<std::size_t>(y - y0) * bw + static_cast<std::size_t>(x - x0);
          if (d2 <= r2 && d2 < best_d2[idx]) {
            best_d2[idx] = d2;
            best_s[idx] = cumulative[j] + u * std::sqrt(len2);
          }
        }
      }
    }

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y - y0) * bw + static_cast<std::size_t>(x - x0);
        if (!std::isfinite(best_d2[idx])) continue;
        const double frac = total > 0.0 ? best_s[idx] / total : 0.0;
        const auto level = static_cast<std::uint8_t>(std::lround(kStrokeStartIntensity + kSpan * frac));
        out.at(x, y) = std::max(out.at(x, y), level);
      }
    }
  }
  return out;
}

}  // namespace cinemaloop
