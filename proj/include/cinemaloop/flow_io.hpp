#pragma once

// Middlebury .flo interchange format.
//
//  bytes  contents
//  0-3    float 202021.25 ("PIEH" in ASCII), little-endian
//  4-7    int32 width
//  8-11   int32 height
//  12-    width*height*2 float32, u and v interleaved, row-major, top row first

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

inline constexpr float kFloMagic = 202021.25f;
/// Components with a larger magnitude mark "unknown flow".
inline constexpr float kUnknownFlowThreshold = 1e9f;

enum class UnknownFlow {
  reject,  ///< throw ValidationError
  zero,    ///< replace the whole vector with (0, 0)
};

MotionField load_flo(std::span<const std::byte> bytes, UnknownFlow policy = UnknownFlow::reject);
std::vector<std::byte> save_flo(const MotionField& field);

MotionField read_flo_file(const std::filesystem::path& path, UnknownFlow policy = UnknownFlow::reject);

}  // namespace cinemaloop
