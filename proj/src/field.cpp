#include "cinemaloop/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cinemaloop {

std::string to_string(const Extent& e) { return std::to_string(e.width) + "x" + std::to_string(e.height); }

namespace detail {
void require_extent(int width, int height) {
  if (width < 1 || height < 1)
    throw ArgumentError("grid dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
}
}  // namespace detail

FluidMask::FluidMask(int width, int height, bool value)
    : extent_{width, height}, flags_(Extent{width, height}.pixels(), value ? 1 : 0) {
  detail::require_extent(width, height);
}

FluidMask::FluidMask(int width, int height, std::vector<std::uint8_t> flags) : extent_{width, height} {
  detail::require_extent(width, height);
  if (flags.size() != extent_.pixels()) throw LengthError("fluid mask: flag count does not match dimensions");
  flags_.reserve(flags.size());
  for (auto f : flags) flags_.push_back(f != 0 ? 1 : 0);
}

std::size_t FluidMask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

ImageF to_float(const ImageU8& image) {
  ImageF out(image.width(), image.height(), image.channels());
  std::transform(image.data().begin(), image.data().end(), out.data().begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
  return out;
}

ImageU8 to_u8(const ImageF& image) {
  ImageU8 out(image.width(), image.height(), image.channels());
  std::transform(image.data().begin(), image.data().end(), out.data().begin(), [](float v) {
    const double scaled = std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(std::lround(scaled));
  });
  return out;
}

}  // namespace cinemaloop
