#pragma once

#include <algorithm>
#include <cmath>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

namespace detail {
inline double lerp(double a, double b, double t) { return a + t * (b - a); }
}  // namespace detail

/// Bilinear interpolation of a vector grid at a continuous position, in
/// double precision. Positions outside [0, w-1] x [0, h-1] are clamped to
/// the border. Grid points and constant grids are reproduced exactly.
template <class Tag>
Point2 sample_bilinear_precise(const VectorGrid<Tag>& grid, Point2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ArgumentError("sample_bilinear: non-finite position");

  const int w = grid.width();
  const int h = grid.height();
  const double x = std::clamp(p.x, 0.0, static_cast<double>(w - 1));
  const double y = std::clamp(p.y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double tx = x - x0;
  const double ty = y - y0;

  const Vec2f& v00 = grid.at(x0, y0);
  const Vec2f& v10 = grid.at(x1, y0);
  const Vec2f& v01 = grid.at(x0, y1);
  const Vec2f& v11 = grid.at(x1, y1);

  using detail::lerp;
  const double u = lerp(lerp(v00.x, v10.x, tx), lerp(v01.x, v11.x, tx), ty);
  const double v = lerp(lerp(v00.y, v10.y, tx), lerp(v01.y, v11.y, tx), ty);
  return {u, v};
}

/// sample_bilinear_precise rounded to float32.
template <class Tag>
Vec2f sample_bilinear(const VectorGrid<Tag>& grid, Point2 p) {
  const Point2 s = sample_bilinear_precise(grid, p);
  return {static_cast<float>(s.x), static_cast<float>(s.y)};
}

}  // namespace cinemaloop
