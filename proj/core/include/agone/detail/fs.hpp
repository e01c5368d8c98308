#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace agone::detail {

// Reads a whole file as bytes; throws agone::Error("IoError", ...) on failure.
std::string read_file(const std::filesystem::path& path);

// Writes bytes to `path`, creating parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

// All regular files under `root` with one of `extensions` (e.g. ".java"),
// sorted lexicographically by generic path string for deterministic output.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& root,
                                              const std::vector<std::string>& extensions);

}  // namespace agone::detail
