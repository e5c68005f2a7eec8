#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "dwarfs/common/error.hpp"

// Little-endian fixed-width I/O for the on-disk dataset formats.
namespace dwarfs::binio {

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  out.write(buf, sizeof(T));
}

/// Returns false on clean EOF before the first byte; throws on a short read.
template <class T>
bool try_read_le(std::istream& in, T& value) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  const auto got = in.gcount();
  if (got == 0) return false;
  if (got != static_cast<std::streamsize>(sizeof(T))) throw FormatError("truncated integer field");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  std::memcpy(&value, buf, sizeof(T));
  return true;
}

template <class T>
T read_le(std::istream& in) {
  T value{};
  if (!try_read_le(in, value)) throw FormatError("unexpected end of file");
  return value;
}

inline void write_magic(std::ostream& out, const char (&magic)[5], std::uint8_t version) {
  out.write(magic, 4);
  write_le<std::uint8_t>(out, version);
}

inline void expect_magic(std::istream& in, const char (&magic)[5], std::uint8_t version) {
  char got[4] = {};
  in.read(got, 4);
  if (in.gcount() != 4 || std::memcmp(got, magic, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + magic);
  const auto v = read_le<std::uint8_t>(in);
  if (v != version)
    throw FormatError(std::string(magic) + ": unsupported version " + std::to_string(v));
}

inline std::string read_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError("truncated payload");
  return s;
}

}  // namespace dwarfs::binio
