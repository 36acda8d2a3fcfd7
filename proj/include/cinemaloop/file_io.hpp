#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cinemaloop {

std::vector<std::byte> read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place, so `path`
/// never holds a partially written payload.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace cinemaloop
