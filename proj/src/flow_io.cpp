#include "cinemaloop/flow_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "cinemaloop/file_io.hpp"

namespace cinemaloop {

static_assert(std::endian::native == std::endian::little, ".flo I/O assumes a little-endian host");

namespace {

constexpr std::size_t kHeaderBytes = 12;

template <class T>
T read_le(std::span<const std::byte> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

template <class T>
void append_le(std::vector<std::byte>& out, T value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

}  // namespace

MotionField load_flo(std::span<const std::byte> bytes, UnknownFlow policy) {
  if (bytes.size() < kHeaderBytes)
    throw LengthError(".flo: file too short for header (" + std::to_string(bytes.size()) + " bytes)");

  const auto magic = read_le<float>(bytes, 0);
  if (magic != kFloMagic)
    throw FormatError(".flo: magic number mismatch (expected 202021.25, got " + std::to_string(magic) + ")");

  const auto width = read_le<std::int32_t>(bytes, 4);
  const auto height = read_le<std::int32_t>(bytes, 8);
  if (width < 1 || height < 1 || width > (1 << 20) || height > (1 << 20))
    throw FormatError(".flo: implausible dimensions " + std::to_string(width) + "x" + std::to_string(height));

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t expected = kHeaderBytes + count * 2 * sizeof(float);
  if (bytes.size() != expected)
    throw LengthError(".flo: expected " + std::to_string(expected) + " bytes for " + std::to_string(width) + "x" +
                      std::to_string(height) + ", got " + std::to_string(bytes.size()));

  std::vector<Vec2f> data(count);
  std::memcpy(data.data(), bytes.data() + kHeaderBytes, count * sizeof(Vec2f));

  for (std::size_t i = 0; i < count; ++i) {
    Vec2f& v = data[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw ValidationError(".flo: non-finite flow at pixel " + std::to_string(i));
    if (std::fabs(v.x) > kUnknownFlowThreshold || std::fabs(v.y) > kUnknownFlowThreshold) {
      if (policy == UnknownFlow::reject)
        throw ValidationError(".flo: unknown-flow sentinel at pixel " + std::to_string(i));
      v = {};
    }
  }
  return MotionField(width, height, std::move(data));
}

std::vector<std::byte> save_flo(const MotionField& field) {
  std::vector<std::byte> out;
  out.reserve(kHeaderBytes + field.data().size_bytes());
  append_le(out, kFloMagic);
  append_le(out, static_cast<std::int32_t>(field.width()));
  append_le(out, static_cast<std::int32_t>(field.height()));
  const auto* p = reinterpret_cast<const std::byte*>(field.data().data());
  out.insert(out.end(), p, p + field.data().size_bytes());
  return out;
}

MotionField read_flo_file(const std::filesystem::path& path, UnknownFlow policy) {
  const auto bytes = read_file(path);
  try {
    return load_flo(bytes, policy);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const LengthError& e) {
    throw LengthError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace cinemaloop
