#include "xling/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace xling::digest {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
  unsigned int raw_len = 0;
  if (EVP_Digest(data.data(), data.size(), raw.data(), &raw_len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(raw_len * 2);
  for (unsigned int i = 0; i < raw_len; ++i) {
    hex.push_back(kHex[raw[i] >> 4]);
    hex.push_back(kHex[raw[i] & 0x0f]);
  }
  return hex;
}

std::string short_hex(std::string_view data) { return sha256_hex(data).substr(0, 16); }

}  // namespace xling::digest
