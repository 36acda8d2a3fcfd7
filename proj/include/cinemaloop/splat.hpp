#pragma once

// Forward softmax splatting and symmetric loop composition.

#include <variant>
#include <vector>

#include "cinemaloop/field.hpp"
#include "cinemaloop/integrate.hpp"

namespace cinemaloop {

/// Targets whose accumulated softmax weight is below this take the static source value.
inline constexpr double kHoleWeight = 1e-8;
inline constexpr double kDefaultMagnitudeGamma = 0.5;

/// Per-pixel softmax exponent Z(p).
class ImportanceMap {
 public:
  ImportanceMap() = default;
  ImportanceMap(int width, int height, float value = 0.0f);
  ImportanceMap(int width, int height, std::vector<float> z);

  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  Extent extent() const { return extent_; }
  float at(int x, int y) const {
    return z_[static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x)];
  }
  std::span<const float> data() const { return z_; }

 private:
  Extent extent_{};
  std::vector<float> z_;
};

/// Weighted sums from one splatting pass. `accum` is channel-interleaved.
struct SplatBuffer {
  Extent extent;
  int channels = 0;
  std::vector<double> accum;
  std::vector<double> weight;
};

/// Every masked source pixel p adds value * e^{Z(p) - Z_max}, split by
/// bilinear weights, onto the four integer neighbours of p + disp(p).
/// Z_max is taken over the masked pixels. Contributions outside the image
/// are dropped. Source pixels are visited in row-major order.
SplatBuffer splat_forward(const ImageF& source, const DisplacementField& disp, const ImportanceMap& z,
                          const FluidMask& mask);

/// Frame n of the loop: the source splatted by forward[n] with weight
/// 1 - n/N and by backward[n] with weight n/N, normalized. Unmasked pixels
/// and holes keep the source value; output is clamped to [0, 1].
ImageF compose_frame(const ImageF& image, const DisplacementSequence& seq, const ImportanceMap& z,
                     const FluidMask& mask, int n);
/// 8-bit convenience overload; frames 0 and N reproduce the input exactly.
ImageU8 compose_frame(const ImageU8& image, const DisplacementSequence& seq, const ImportanceMap& z,
                      const FluidMask& mask, int n);

struct UniformZ {};
/// Z(p) = -gamma * |F(p)|: slower pixels win collisions.
struct MagnitudeZ {
  double gamma = kDefaultMagnitudeGamma;
};
using ZPolicy = std::variant<UniformZ, MagnitudeZ>;

ImportanceMap make_importance(const MotionField& field, const ZPolicy& policy);

struct FrameSequence {
  int loop_length = 0;
  std::vector<ImageU8> frames;
};

/// Frames n = 0..N-1 of the loop. Frame N would equal frame 0, so playing
/// the sequence cyclically is seamless.
FrameSequence render_loop(const ImageU8& image, const MotionField& field, const FluidMask& mask, int loop_length,
                          const ZPolicy& policy = UniformZ{});

}  // namespace cinemaloop
