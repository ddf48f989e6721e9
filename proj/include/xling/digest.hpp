#pragma once

#include <string>
#include <string_view>

namespace xling::digest {

std::string sha256_hex(std::string_view data);

// First 16 hex characters of the SHA-256; enough for fingerprints.
std::string short_hex(std::string_view data);

}  // namespace xling::digest
