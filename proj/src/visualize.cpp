#include "cinemaloop/visualize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cinemaloop {

namespace {

std::vector<Rgb8> build_wheel() {
  // Segment lengths follow perceptual spacing: more shades between red and
  // yellow than between yellow and green.
  constexpr int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
  std::vector<Rgb8> wheel;
  wheel.reserve(RY + YG + GC + CB + BM + MR);
  auto push = [&](int r, int g, int b) {
    wheel.push_back({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)});
  };
  for (int i = 0; i < RY; ++i) push(255, 255 * i / RY, 0);
  for (int i = 0; i < YG; ++i) push(255 - 255 * i / YG, 255, 0);
  for (int i = 0; i < GC; ++i) push(0, 255, 255 * i / GC);
  for (int i = 0; i < CB; ++i) push(0, 255 - 255 * i / CB, 255);
  for (int i = 0; i < BM; ++i) push(255 * i / BM, 0, 255);
  for (int i = 0; i < MR; ++i) push(255, 0, 255 - 255 * i / MR);
  return wheel;
}

}  // namespace

const std::vector<Rgb8>& color_wheel() {
  static const std::vector<Rgb8> wheel = build_wheel();
  return wheel;
}

Rgb8 flow_color(double u, double v) {
  const auto& wheel = color_wheel();
  const int ncols = static_cast<int>(wheel.size());

  const double rad = std::min(std::sqrt(u * u + v * v), 1.0);
  const double a = std::atan2(-v, -u) / std::numbers::pi;
  const double fk = (a + 1.0) / 2.0 * (ncols - 1);
  const int k0 = std::clamp(static_cast<int>(fk), 0, ncols - 1);
  const int k1 = (k0 + 1) % ncols;
  const double f = fk - k0;

  Rgb8 out{};
  for (int b = 0; b < 3; ++b) {
    const double col0 = wheel[k0][b] / 255.0;
    const double col1 = wheel[k1][b] / 255.0;
    const double col = 1.0 - rad * (1.0 - ((1.0 - f) * col0 + f * col1));
    out[b] = static_cast<std::uint8_t>(std::lround(std::clamp(col, 0.0, 1.0) * 255.0));
  }
  return out;
}

ImageU8 visualize_flow(const MotionField& field, std::optional<double> max_radius) {
  auto magnitude = [](const Vec2f& f) {
    const double u = f.x, v = f.y;
    return std::sqrt(u * u + v * v);
  };

  double radius = 0.0;
  if (max_radius) {
    if (!(*max_radius > 0.0) || !std::isfinite(*max_radius))
      throw ArgumentError("visualize_flow: max radius must be positive and finite");
    radius = *max_radius;
  } else {
    for (const auto& f : field.data()) radius = std::max(radius, magnitude(f));
    radius = std::max(radius, 1e-6);
  }

  ImageU8 out(field.width(), field.height(), 3);
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const Vec2f& f = field.at(x, y);
      const Rgb8 c = flow_color(f.x / radius, f.y / radius);
      for (int b = 0; b < 3; ++b) out.at(x, y, b) = c[b];
    }
  }
  return out;
}

}  // namespace cinemaloop
