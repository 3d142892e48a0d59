#pragma once

#include <filesystem>
#include <string>

namespace overlapcheck::detail {

// Reads a whole file; throws IoError when the file is missing or unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes content to path via a temp file in the same directory plus rename,
// so a failed write never leaves a partial file behind. Throws IoError.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace overlapcheck::detail
