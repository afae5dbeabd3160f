#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace scicheck {

// Reads a whole file; throws std::runtime_error (not a domain Error) on IO failure.
std::string read_file(const std::filesystem::path& path);

// Writes and fsyncs.
void write_file_durable(const std::filesystem::path& path, std::string_view content);
// Appends and fsyncs.
void append_file_durable(const std::filesystem::path& path, std::string_view content);

}  // namespace scicheck
