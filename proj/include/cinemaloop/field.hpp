#pragma once

// Core raster types: motion/displacement vector grids, fluid masks and
// channel-generic images. All grids are row-major with the top row first;
// pixel (x, y) sits at continuous position (x, y).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cinemaloop/error.hpp"

namespace cinemaloop {

struct Vec2f {
  float x = 0.0f;
  float y = 0.0f;

  friend bool operator==(const Vec2f&, const Vec2f&) = default;
};

/// Continuous image-plane position, origin top-left, y down.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Extent {
  int width = 0;
  int height = 0;

  std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  friend bool operator==(const Extent&, const Extent&) = default;
};

std::string to_string(const Extent& e);

namespace detail {
void require_extent(int width, int height);
}

/// Dense grid of 2D vectors. `Tag` keeps velocity and displacement grids
/// from being mixed up at compile time.
template <class Tag>
class VectorGrid {
 public:
  VectorGrid() = default;

  VectorGrid(int width, int height) : extent_{width, height} {
    detail::require_extent(width, height);
    data_.resize(extent_.pixels());
  }

  VectorGrid(int width, int height, std::vector<Vec2f> data) : extent_{width, height}, data_(std::move(data)) {
    detail::require_extent(width, height);
    if (data_.size() != extent_.pixels())
      throw LengthError("vector grid: expected " + std::to_string(extent_.pixels()) + " vectors, got " +
                        std::to_string(data_.size()));
  }

  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  Extent extent() const { return extent_; }

  const Vec2f& at(int x, int y) const { return data_[index(x, y)]; }
  Vec2f& at(int x, int y) { return data_[index(x, y)]; }

  std::span<const Vec2f> data() const { return data_; }
  std::span<Vec2f> data() { return data_; }

  friend bool operator==(const VectorGrid&, const VectorGrid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x);
  }

  Extent extent_{};
  std::vector<Vec2f> data_;
};

struct MotionTag;
struct DisplacementTag;

/// Per-pixel velocity (u, v) in pixels/frame.
using MotionField = VectorGrid<MotionTag>;

/// Accumulated per-pixel displacement after `step_index` integration steps.
class DisplacementField : public VectorGrid<DisplacementTag> {
 public:
  DisplacementField() = default;
  DisplacementField(int width, int height, int step_index)
      : VectorGrid<DisplacementTag>(width, height), step_index_(step_index) {}

  int step_index() const { return step_index_; }

  friend bool operator==(const DisplacementField&, const DisplacementField&) = default;

 private:
  int step_index_ = 0;
};

/// Boolean fluid-region indicator; true means the pixel may move.
class FluidMask {
 public:
  FluidMask() = default;
  FluidMask(int width, int height, bool value = false);
  FluidMask(int width, int height, std::vector<std::uint8_t> flags);

  static FluidMask full(Extent e) { return FluidMask(e.width, e.height, true); }

  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  Extent extent() const { return extent_; }

  bool at(int x, int y) const {
    return flags_[static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x)] != 0;
  }
  void set(int x, int y, bool value) {
    flags_[static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x)] =
        value ? 1 : 0;
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  friend bool operator==(const FluidMask&, const FluidMask&) = default;

 private:
  Extent extent_{};
  std::vector<std::uint8_t> flags_;
};

/// Row-major, channel-interleaved image. `std::uint8_t` samples span
/// [0, 255]; `float` samples span [0, 1].
template <class T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, int channels) : extent_{width, height}, channels_(channels) {
    detail::require_extent(width, height);
    if (channels < 1) throw ArgumentError("raster: channel count must be >= 1");
    data_.resize(extent_.pixels() * static_cast<std::size_t>(channels));
  }
  Raster(int width, int height, int channels, std::vector<T> data) : Raster(width, height, channels) {
    if (data.size() != data_.size())
      throw LengthError("raster: expected " + std::to_string(data_.size()) + " samples, got " +
                        std::to_string(data.size()));
    data_ = std::move(data);
  }

  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  int channels() const { return channels_; }
  Extent extent() const { return extent_; }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_.width) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  Extent extent_{};
  int channels_ = 0;
  std::vector<T> data_;
};

using ImageU8 = Raster<std::uint8_t>;
using ImageF = Raster<float>;

ImageF to_float(const ImageU8& image);
/// Rounds to nearest and clamps to [0, 255].
ImageU8 to_u8(const ImageF& image);

}  // namespace cinemaloop
