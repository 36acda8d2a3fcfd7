#pragma once

// PNG encode/decode for images and masks.

#include <cstddef>
#include <span>
#include <vector>

#include "cinemaloop/field.hpp"

namespace cinemaloop {

/// Decodes any 8-bit PNG into a 3-channel RGB image.
ImageU8 decode_png_rgb(std::span<const std::byte> bytes);
/// Decodes a PNG as 8-bit grayscale; samples > 127 are fluid.
FluidMask decode_png_mask(std::span<const std::byte> bytes);
/// Encodes 1- or 3-channel (RGB) 8-bit images.
std::vector<std::byte> encode_png(const ImageU8& image);

ImageU8 mask_to_image(const FluidMask& mask);

}  // namespace cinemaloop
