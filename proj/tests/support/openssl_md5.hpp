#pragma once

#include <openssl/evp.h>

#include <array>
#include <string_view>

namespace dwarfs::testing {

/// Second MD5 implementation for cross-checking.
inline std::array<unsigned char, 16> openssl_md5(std::string_view data) {
  std::array<unsigned char, 16> out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_md5(), nullptr);
  return out;
}

}  // namespace dwarfs::testing
