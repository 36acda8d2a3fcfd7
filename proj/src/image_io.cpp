#include "cinemaloop/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace cinemaloop {

namespace {

cv::Mat decode(std::span<const std::byte> bytes, int flags) {
  if (bytes.empty()) throw FormatError("png: empty payload");
  const cv::Mat buffer(1, static_cast<int>(bytes.size()), CV_8UC1,
                       const_cast<std::byte*>(bytes.data()));
  cv::Mat decoded;
  try {
    decoded = cv::imdecode(buffer, flags);
  } catch (const cv::Exception&) {
    decoded.release();
  }
  if (decoded.empty()) throw FormatError("png: payload could not be decoded as an image");
  if (decoded.depth() != CV_8U) throw FormatError("png: only 8-bit images are supported");
  return decoded;
}

}  // namespace

ImageU8 decode_png_rgb(std::span<const std::byte> bytes) {
  cv::Mat bgr = decode(bytes, cv::IMREAD_COLOR);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  ImageU8 out(rgb.cols, rgb.rows, 3);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<std::uint8_t>(y);
    std::copy(row, row + rgb.cols * 3, &out.at(0, y, 0));
  }
  return out;
}

FluidMask decode_png_mask(std::span<const std::byte> bytes) {
  cv::Mat gray = decode(bytes, cv::IMREAD_GRAYSCALE);
  FluidMask mask(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) mask.set(x, y, row[x] > 127);
  }
  return mask;
}

std::vector<std::byte> encode_png(const ImageU8& image) {
  if (image.channels() != 1 && image.channels() != 3)
    throw ArgumentError("png: only 1- and 3-channel images can be encoded");
  const int type = image.channels() == 1 ? CV_8UC1 : CV_8UC3;
  cv::Mat mat(image.height(), image.width(), type, const_cast<std::uint8_t*>(image.data().data()));
  // separate buffer: converting in place would scribble over the caller's image
  cv::Mat to_write;
  if (image.channels() == 3)
    cv::cvtColor(mat, to_write, cv::COLOR_RGB2BGR);
  else
    to_write = mat;

  std::vector<std::uint8_t> buffer;
  if (!cv::imencode(".png", to_write, buffer)) throw FormatError("png: encoding failed");
  const auto* p = reinterpret_cast<const std::byte*>(buffer.data());
  return {p, p + buffer.size()};
}

ImageU8 mask_to_image(const FluidMask& mask) {
  ImageU8 out(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) out.at(x, y) = mask.at(x, y) ? 255 : 0;
  return out;
}

}  // namespace cinemaloop
