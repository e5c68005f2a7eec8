#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace dwarfs::kernels {

/// 128-bit checksum of a kernel's canonical output.
struct Digest128 {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  static Digest128 from_hex(std::string_view hex);

  Digest128& operator^=(const Digest128& other) {
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] ^= other.bytes[i];
    return *this;
  }
  bool operator==(const Digest128&) const = default;
};

}  // namespace dwarfs::kernels
