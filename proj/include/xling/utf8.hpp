#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xling::utf8 {

// Splits text into codepoint-sized byte chunks. Invalid sequences fall back
// to single-byte chunks so downstream edits never make the text worse.
std::vector<std::string> chunks(std::string_view text);

bool is_valid(std::string_view text);

}  // namespace xling::utf8
