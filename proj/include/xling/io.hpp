#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace xling::io {

std::string read_file(const std::filesystem::path& file);

// Creates parent directories, writes to a temp sibling, then renames so a
// crash never leaves a truncated file behind.
void write_file(const std::filesystem::path& file, std::string_view content);

void append_line(const std::filesystem::path& file, std::string_view line);

std::vector<std::string> read_lines(const std::filesystem::path& file);

std::vector<std::string> split(std::string_view line, char sep);

std::string trim(std::string_view text);

}  // namespace xling::io
