#include "cinemaloop/splat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cinemaloop {

ImportanceMap::ImportanceMap(int width, int height, float value)
    : extent_{width, height}, z_(Extent{width, height}.pixels(), value) {
  detail::require_extent(width, height);
  if (!std::isfinite(value)) throw ArgumentError("importance map: values must be finite");
}

ImportanceMap::ImportanceMap(int width, int height, std::vector<float> z) : extent_{width, height}, z_(std::move(z)) {
  detail::require_extent(width, height);
  if (z_.size() != extent_.pixels()) throw LengthError("importance map: value count does not match dimensions");
  if (!std::all_of(z_.begin(), z_.end(), [](float v) { return std::isfinite(v); }))
    throw ArgumentError("importance map: values must be finite");
}

namespace {

void require_same(Extent expected, Extent got, const char* what) {
  if (expected != got)
    throw ArgumentError(std::string(what) + " " + to_string(got) + " does not match image " + to_string(expected));
}

}  // namespace

SplatBuffer splat_forward(const ImageF& source, const DisplacementField& disp, const ImportanceMap& z,
                          const FluidMask& mask) {
  const Extent e = source.extent();
  require_same(e, disp.extent(), "displacement");
  require_same(e, z.extent(), "importance map");
  require_same(e, mask.extent(), "mask");

  const int channels = source.channels();
  SplatBuffer buf;
  buf.extent = e;
  buf.channels = channels;
  buf.accum.assign(e.pixels() * static_cast<std::size_t>(channels), 0.0);
  buf.weight.assign(e.pixels(), 0.0);

  float z_max = -std::numeric_limits<float>::infinity();
  for (int y = 0; y < e.height; ++y)
    for (int x = 0; x < e.width; ++x)
      if (mask.at(x, y)) z_max = std::max(z_max, z.at(x, y));
  if (!std::isfinite(z_max)) return buf;

  for (int y = 0; y < e.height; ++y) {
    for (int x = 0; x < e.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double softmax = std::exp(static_cast<double>(z.at(x, y)) - static_cast<double>(z_max));
      const Vec2f d = disp.at(x, y);
      const double tx = x + static_cast<double>(d.x);
      const double ty = y + static_cast<double>(d.y);
      const double fx0 = std::floor(tx);
      const double fy0 = std::floor(ty);
      const double fx = tx - fx0;
      const double fy = ty - fy0;
      const double bilinear[4] = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);

      for (int k = 0; k < 4; ++k) {
        const int qx = x0 + (k & 1);
        const int qy = y0 + (k >> 1);
        if (!e.contains(qx, qy) || bilinear[k] == 0.0) continue;
        const double w = softmax * bilinear[k];
        const std::size_t q = static_cast<std::size_t>(qy) * e.width + static_cast<std::size_t>(qx);
        buf.weight[q] += w;
        for (int c = 0; c < channels; ++c) buf.accum[q * channels + c] += w * source.at(x, y, c);
      }
    }
  }
  return buf;
}

ImageF compose_frame(const ImageF& image, const DisplacementSequence& seq, const ImportanceMap& z,
                     const FluidMask& mask, int n) {
  const int loop = seq.loop_length;
  if (loop < 1 || seq.forward.size() != static_cast<std::size_t>(loop) + 1 ||
      seq.backward.size() != static_cast<std::size_t>(loop) + 1)
    throw ArgumentError("compose_frame: malformed displacement sequence");
  if (n < 0 || n > loop)
    throw ArgumentError("compose_frame: frame index " + std::to_string(n) + " outside [0, " + std::to_string(loop) + "]");
  require_same(image.extent(), mask.extent(), "mask");

  const double alpha = 1.0 - static_cast<double>(n) / loop;
  const double alpha_hat = static_cast<double>(n) / loop;

  SplatBuffer fwd, bwd;
  if (alpha > 0.0) fwd = splat_forward(image, seq.forward[static_cast<std::size_t>(n)], z, mask);
  if (alpha_hat > 0.0) bwd = splat_forward(image, seq.backward[static_cast<std::size_t>(n)], z, mask);

  const Extent e = image.extent();
  const int channels = image.channels();
  ImageF out = image;
  for (int y = 0; y < e.height; ++y) {
    for (int x = 0; x < e.width; ++x) {
      if (!mask.at(x, y)) continue;
      const std::size_t q = static_cast<std::size_t>(y) * e.width + static_cast<std::size_t>(x);
      double total = 0.0;
      if (alpha > 0.0) total += alpha * fwd.weight[q];
      if (alpha_hat > 0.0) total += alpha_hat * bwd.weight[q];
      if (total < kHoleWeight) continue;
      for (int c = 0; c < channels; ++c) {
        double sum = 0.0;
        if (alpha > 0.0) sum += alpha * fwd.accum[q * channels + c];
        if (alpha_hat > 0.0) sum += alpha_hat * bwd.accum[q * channels + c];
        out.at(x, y, c) = static_cast<float>(std::clamp(sum / total, 0.0, 1.0));
      }
    }
  }
  return out;
}

ImageU8 compose_frame(const ImageU8& image, const DisplacementSequence& seq, const ImportanceMap& z,
                      const FluidMask& mask, int n) {
  return to_u8(compose_frame(to_float(image), seq, z, mask, n));
}

ImportanceMap make_importance(const MotionField& field, const ZPolicy& policy) {
  if (std::holds_alternative<UniformZ>(policy)) return ImportanceMap(field.width(), field.height(), 0.0f);

  const double gamma = std::get<MagnitudeZ>(policy).gamma;
  if (!std::isfinite(gamma)) throw ArgumentError("magnitude importance: gamma must be finite");
  std::vector<float> z;
  z.reserve(field.data().size());
  for (const auto& v : field.data())
    z.push_back(static_cast<float>(-gamma * std::hypot(static_cast<double>(v.x), static_cast<double>(v.y))));
  return ImportanceMap(field.width(), field.height(), std::move(z));
}

FrameSequence render_loop(const ImageU8& image, const MotionField& field, const FluidMask& mask, int loop_length,
                          const ZPolicy& policy) {
  if (loop_length < 2) throw ArgumentError("render_loop: need at least 2 frames");
  require_same(image.extent(), field.extent(), "motion field");
  require_same(image.extent(), mask.extent(), "mask");

  const DisplacementSequence seq = integrate_displacements(field, loop_length, mask);
  const ImportanceMap z = make_importance(field, policy);
  const ImageF source = to_float(image);

  FrameSequence out;
  out.loop_length = loop_length;
  out.frames.reserve(static_cast<std::size_t>(loop_length));
  for (int n = 0; n < loop_length; ++n) out.frames.push_back(to_u8(compose_frame(source, seq, z, mask, n)));
  return out;
}

}  // namespace cinemaloop
