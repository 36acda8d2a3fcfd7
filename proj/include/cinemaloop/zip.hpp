#pragma once

// Minimal zip writer (STORE method, no compression) for preview bundles.

#include <string>
#include <utility>
#include <vector>

namespace cinemaloop {

struct ZipEntry {
  std::string name;
  std::string data;
};

/// Archive bytes for `entries` in the given order. Timestamps are fixed so
/// identical entries give identical archives.
std::string make_zip(const std::vector<ZipEntry>& entries);

}  // namespace cinemaloop
